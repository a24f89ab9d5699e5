"""Deterministic automata over bit columns, one track per variable.

Transition tables are partial: a missing entry goes to an implicit dead
state.  Column ``i`` of an input string holds, for every track, the
coefficient of ``h^i(c)`` in that variable's value.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

__all__ = ["TrackDfa", "intersect", "find_witness", "Column", "Word"]

Column = tuple[int, ...]
Word = tuple[Column, ...]
State = Hashable


@dataclass(frozen=True)
class TrackDfa:
    tracks: tuple[str, ...]
    start: State
    accepting: frozenset
    delta: dict = field(hash=False, compare=False)  # (state, column) -> state
    name: str = ""

    def __post_init__(self):
        if len(set(self.tracks)) != len(self.tracks):
            raise ValueError(f"repeated track in {self.tracks}")

    @property
    def states(self) -> set:
        out = {self.start}
        for (q, _), r in self.delta.items():
            out.add(q)
            out.add(r)
        return out

    def outgoing(self, q: State) -> list[tuple[Column, State]]:
        idx = self._index()
        return idx.get(q, [])

    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {}
            for (q, col), r in self.delta.items():
                idx.setdefault(q, []).append((col, r))
            object.__setattr__(self, "_idx", idx)
        return idx

    def run(self, word: Iterable[Column]) -> State | None:
        q = self.start
        for col in word:
            q = self.delta.get((q, tuple(col)))
            if q is None:
                return None
        return q

    def accepts(self, word: Iterable[Column]) -> bool:
        q = self.run(word)
        return q is not None and q in self.accepting

    def project(self, word: Sequence[Column], order: Sequence[str]) -> Word:
        """Restrict columns laid out in ``order`` to this automaton's tracks."""
        pos = [order.index(t) for t in self.tracks]
        return tuple(tuple(col[p] for p in pos) for col in word)

    def to_dot(self) -> str:
        names = {}
        for q in sorted(self.states, key=repr):
            names[q] = f"q{len(names)}" if not isinstance(q, str) else q
        if self.start in names:
            names = {self.start: names[self.start], **{k: v for k, v in names.items() if k != self.start}}
        lines = [f'digraph "{self.name or "dfa"}" {{', "  rankdir=LR;",
                 f'  label="tracks ({", ".join(self.tracks)})";',
                 '  init [shape=point];']
        for q, n in names.items():
            shape = "doublecircle" if q in self.accepting else "circle"
            lines.append(f'  "{n}" [shape={shape}];')
        lines.append(f'  init -> "{names[self.start]}";')
        grouped: dict[tuple, list[str]] = {}
        for (q, col), r in sorted(self.delta.items(), key=repr):
            grouped.setdefault((names[q], names[r]), []).append("".join(map(str, col)))
        for (a, b), labels in grouped.items():
            lines.append(f'  "{a}" -> "{b}" [label="{",".join(sorted(labels))}"];')
        n_cols = 2 ** len(self.tracks)
        partial = any(len(self.outgoing(q)) < n_cols for q in names)
        if partial:
            lines.append('  "D" [shape=circle, style=dashed];')
            lines.append('  // columns without an edge lead to D')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _join(parts: list[list[tuple[dict[str, int], State]]]):
    """Combine per-automaton moves that agree on shared tracks."""
    acc: list[tuple[dict[str, int], tuple]] = [({}, ())]
    for moves in parts:
        nxt = []
        for assign, states in acc:
            for a2, r in moves:
                if all(assign.get(t, b) == b for t, b in a2.items()):
                    merged = dict(assign)
                    merged.update(a2)
                    nxt.append((merged, states + (r,)))
        acc = nxt
        if not acc:
            break
    return acc


def intersect(dfas: Sequence[TrackDfa], order: Sequence[str] | None = None,
              name: str = "product") -> TrackDfa:
    """Product automaton over ``order`` (default: union of tracks in order of
    appearance).  Tracks no factor constrains are free."""
    if order is None:
        order = []
        for d in dfas:
            order.extend(t for t in d.tracks if t not in order)
    order = tuple(order)
    start = tuple(d.start for d in dfas)
    delta: dict = {}
    seen = {start}
    queue = deque([start])
    while queue:
        qs = queue.popleft()
        parts = []
        for d, q in zip(dfas, qs):
            parts.append([(dict(zip(d.tracks, col)), r) for col, r in d.outgoing(q)])
        for assign, rs in _join(parts):
            free = [t for t in order if t not in assign]
            for bits in range(2 ** len(free)):
                full = dict(assign)
                for k, t in enumerate(free):
                    full[t] = (bits >> k) & 1
                delta[(qs, tuple(full[t] for t in order))] = rs
            if rs not in seen:
                seen.add(rs)
                queue.append(rs)
    accepting = frozenset(q for q in seen if all(s in d.accepting for d, s in zip(dfas, q)))
    return TrackDfa(order, start, accepting, delta, name)


def find_witness(dfa: TrackDfa) -> Word | None:
    """A shortest accepted word (breadth-first), trailing zero columns cut."""
    if dfa.start in dfa.accepting:
        return ()
    parent = {dfa.start: None}
    queue = deque([dfa.start])
    while queue:
        q = queue.popleft()
        for col, r in sorted(dfa.outgoing(q)):
            if r in parent:
                continue
            parent[r] = (q, col)
            if r in dfa.accepting:
                word = []
                while parent[r] is not None:
                    r, col = parent[r]
                    word.append(col)
                word.reverse()
                while word and not any(word[-1]):
                    word.pop()
                return tuple(word)
            queue.append(r)
    return None
