"""Substitution-producing automata.

Every ground solution factors as a zero substitution followed by a string of
layer substitutions ``x -> sum(T)``, ``T`` a nonempty subset of the constants
plus ``h(x)``.  The solution automaton of ``s =↓ t`` reads such a string one
layer at a time: a layer must make the degree-0 summands of both sides agree
and keep the right side duplicate-free, after which one ``h`` is peeled off
both sides.  Side automata enforce restrictions and disequalities.  Products
of these automata, explored breadth-first, enumerate a complete set of
asymmetric unifiers up to a depth.
"""
from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .problem import Problem, fresh_name
from .rewrite import is_irreducible_r2_ach, is_asymmetric_unifier
from .terms import (
    Atom, Term, Monomial, CanonicalTerm, Substitution, canonicalize, apply, plus,
    hpow, ZERO, mset,
)
from .decision import generalize_witness, FRESH_CONSTANT

__all__ = [
    "HOLD", "Letter", "loseh", "layer_alphabet", "layer_decompose", "compose_layers",
    "SolutionAutomaton", "build_solution_automaton", "LcrAutomaton",
    "VarConstAutomaton", "VarVarAutomaton", "build_side_automata",
    "ExplorationBoundExceeded", "Branch", "zero_substitutions", "ProductGraph",
    "explore", "enumerate_unifiers", "Classification", "classify_finitary",
    "is_instance", "InstanceChecker", "letter_to_substitution",
]

HOLD = "h"  # marks h(x) in a layer image


class ExplorationBoundExceeded(RuntimeError):
    pass


# A letter maps each bound variable to a frozenset of items: constants (Atom)
# and possibly HOLD.  Stored as a sorted tuple of (variable, items) pairs.
Letter = tuple


def letter_to_substitution(letter: Letter) -> Substitution:
    out = {}
    for x, items in letter:
        parts = [hpow(x, 1) if it == HOLD else it for it in _sorted_items(items)]
        out[x] = plus(*parts)
    return Substitution(out)


def _sorted_items(items):
    return sorted(items, key=lambda it: (it != HOLD, "" if it == HOLD else it.name))


def show_letter(letter: Letter) -> str:
    return str(letter_to_substitution(letter))


# ---------------------------------------------------------------------------
# monomial-level helpers

def loseh(t: Term | CanonicalTerm) -> CanonicalTerm:
    """Drop degree-0 summands, lower the degree of the others by one."""
    if not isinstance(t, CanonicalTerm):
        counts = mset(t)
        return CanonicalTerm.xor([[Monomial(m.degree - 1, m.base)] * n
                                  for m, n in counts.items() if m.degree > 0])
    return CanonicalTerm(Monomial(m.degree - 1, m.base) for m in t.monomials if m.degree > 0)


def _apply_letter_mset(t: CanonicalTerm, binding: dict) -> list[Monomial]:
    out = []
    for m in t.monomials:
        b = m.base
        items = binding.get(b) if isinstance(b, Atom) and not b.is_const else None
        if items is None:
            out.append(m)
            continue
        for it in items:
            out.append(Monomial(m.degree + 1, b) if it == HOLD else Monomial(m.degree, it))
    return out


def _xor(mons: Iterable[Monomial]) -> CanonicalTerm:
    acc: set = set()
    for m in mons:
        acc ^= {m}
    return CanonicalTerm(acc)


def layer_alphabet(p: Problem, constants: Sequence[Atom] | None = None,
                   variables: Sequence[Atom] | None = None) -> Iterator[Letter]:
    """All layer substitutions binding every variable (lazily generated)."""
    consts = list(constants) if constants is not None else _extended_constants(p)[0]
    xs = list(variables) if variables is not None else p.variables()
    items = consts + [HOLD]
    images = [frozenset(c) for r in range(1, len(items) + 1)
              for c in itertools.combinations(items, r)]
    for combo in itertools.product(images, repeat=len(xs)):
        yield tuple(zip(xs, combo))


def _extended_constants(p: Problem) -> tuple[list[Atom], Atom]:
    consts = p.constants()
    taken = {c.name for c in consts} | {x.name for x in p.variables()}
    c = Atom(fresh_name(FRESH_CONSTANT, taken), True)
    return consts + [c], c


# ---------------------------------------------------------------------------
# layer decomposition

def layer_decompose(theta: Substitution) -> tuple[frozenset, list[Letter]]:
    """Split a ground substitution into a zero substitution and layers.

    Layer ``i`` binds every variable whose image still has a monomial of
    degree ``>= i``: to the degree-``i`` constants of the image, plus
    ``h(x)`` when higher degrees remain.  A variable with nothing at degree
    ``i`` but more above gets just ``h(x)``.
    """
    canon = {x: canonicalize(t) for x, t in theta.items()}
    zeroed = frozenset(x for x, t in canon.items() if not t)
    live = {x: t for x, t in canon.items() if t}
    layers: list[Letter] = []
    i = 0
    while live:
        letter = []
        nxt = {}
        for x in sorted(live, key=lambda a: a.name):
            t = live[x]
            items = {m.base for m in t.monomials if m.degree == i}
            if t.degree > i:
                items.add(HOLD)
                nxt[x] = t
            letter.append((x, frozenset(items)))
        layers.append(tuple(letter))
        live = nxt
        i += 1
    return zeroed, layers


def compose_layers(zeroed: Iterable[Atom], layers: Sequence[Letter],
                   variables: Iterable[Atom] = ()) -> Substitution:
    """``zeta theta_0 ... theta_m`` as a substitution on the given variables."""
    xs = set(variables) | set(zeroed)
    for letter in layers:
        xs |= {x for x, _ in letter}
    images = {x: (CanonicalTerm() if x in set(zeroed) else CanonicalTerm([Monomial(0, x)]))
              for x in xs}
    for letter in layers:
        binding = dict(letter)
        images = {x: _xor(_apply_letter_mset(t, binding)) for x, t in images.items()}
    return Substitution({x: t.to_term() for x, t in images.items()})


# ---------------------------------------------------------------------------
# automata over layers

@dataclass(frozen=True)
class ResidualState:
    lhs: CanonicalTerm
    rhs: CanonicalTerm

    def variables(self) -> frozenset:
        return frozenset(self.lhs.variables() | self.rhs.variables())

    def __str__(self) -> str:
        return f"{self.lhs} =↓ {self.rhs}"


class SolutionAutomaton:
    """States ``q_{s =↓ t}``; accepting when both sides coincide."""

    kind = "solution"

    def __init__(self, lhs: CanonicalTerm, rhs: CanonicalTerm, label: str = ""):
        self.start = ResidualState(lhs, rhs)
        self.label = label or str(self.start)

    def needs(self, q: ResidualState) -> frozenset:
        return q.variables()

    def accepting(self, q: ResidualState) -> bool:
        return q.lhs == q.rhs

    def dead(self, q: ResidualState) -> bool:
        return not q.variables() and q.lhs != q.rhs

    def step(self, q: ResidualState, binding: dict) -> ResidualState | None:
        t_mons = _apply_letter_mset(q.rhs, binding)
        if len(set(t_mons)) != len(t_mons):
            return None
        s = _xor(_apply_letter_mset(q.lhs, binding))
        s0 = {m for m in s.monomials if m.degree == 0}
        t0 = {m for m in t_mons if m.degree == 0}
        if s0 != t0:
            return None
        return ResidualState(loseh(s), loseh(CanonicalTerm(t_mons)))

    def states_and_edges(self, letters: Sequence[Letter]):
        """Reachable states and transitions (letters restricted to each
        state's variables)."""
        seen = {self.start}
        edges = []
        queue = deque([self.start])
        while queue:
            q = queue.popleft()
            need = self.needs(q)
            if self.accepting(q) and not need:
                continue
            done = set()
            for letter in letters:
                sub = tuple((x, T) for x, T in letter if x in need)
                if len(sub) != len(need) or sub in done:
                    continue
                done.add(sub)
                r = self.step(q, dict(sub))
                if r is None:
                    continue
                edges.append((q, sub, r))
                if r not in seen:
                    seen.add(r)
                    queue.append(r)
        return seen, edges

    def to_dot(self, letters: Sequence[Letter], name: str = "M") -> str:
        states, edges = self.states_and_edges(letters)
        order = sorted(states, key=lambda q: (q != self.start, str(q)))
        ids = {q: f"q{i}" for i, q in enumerate(order)}
        lines = [f'digraph "{name}" {{', "  rankdir=LR;", "  init [shape=point];"]
        for q in order:
            shape = "doublecircle" if self.accepting(q) else "box"
            lines.append(f'  {ids[q]} [label="{q}", shape={shape}];')
        lines.append(f"  init -> {ids[self.start]};")
        for q, sub, r in edges:
            lines.append(f'  {ids[q]} -> {ids[r]} [label="{show_letter(sub)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_solution_automaton(lhs: Term, rhs: Term) -> SolutionAutomaton:
    return SolutionAutomaton(canonicalize(lhs), canonicalize(rhs))


class LcrAutomaton:
    """One state; drops letters putting a restricted constant into a variable."""

    kind = "lcr"

    def __init__(self, lcr: Iterable[tuple[Atom, Atom]]):
        self.forbidden: dict[Atom, set] = {}
        for c, x in lcr:
            self.forbidden.setdefault(x, set()).add(c)
        self.start = 0

    def needs(self, q):
        return frozenset()

    def accepting(self, q):
        return True

    def dead(self, q):
        return False

    def allows(self, x: Atom, items: frozenset) -> bool:
        return not (self.forbidden.get(x, set()) & items)

    def step(self, q, binding):
        for x, items in binding.items():
            if not self.allows(x, items):
                return None
        return q


class VarConstAutomaton:
    """``x != c``: the first layer must not be exactly ``{c}``."""

    kind = "var_const"

    def __init__(self, pairs: Iterable[tuple[Atom, Atom]], zeroed: frozenset = frozenset()):
        self.pairs = tuple((x, c) for x, c in pairs if x not in zeroed)
        self.start = 0 if self.pairs else 1

    def needs(self, q):
        return frozenset(x for x, _ in self.pairs) if q == 0 else frozenset()

    def accepting(self, q):
        return True

    def dead(self, q):
        return False

    def step(self, q, binding):
        if q == 1:
            return 1
        for x, c in self.pairs:
            if binding.get(x) == frozenset({c}):
                return None
        return 1


class VarVarAutomaton:
    """``x != y``: stay in q0 while both layers agree up to renaming and keep
    their ``h``; move to the accepting q1 once they differ."""

    kind = "var_var"

    def __init__(self, x: Atom, y: Atom, zeroed: frozenset = frozenset()):
        self.x, self.y = x, y
        self.start = 1 if (x in zeroed) != (y in zeroed) else 0

    def needs(self, q):
        return frozenset({self.x, self.y}) if q == 0 else frozenset()

    def accepting(self, q):
        return q == 1

    def dead(self, q):
        return False

    def step(self, q, binding):
        if q == 1:
            return 1
        tx, ty = binding[self.x], binding[self.y]
        if tx == ty:
            return 0 if HOLD in tx else None
        return 1


def build_side_automata(p: Problem, zeroed: frozenset = frozenset()) -> list:
    out: list = []
    if p.lcr:
        out.append(LcrAutomaton(p.lcr))
    vc = [(x, y) for x, y in p.diseqs if y.is_const]
    if vc:
        out.append(VarConstAutomaton(vc, zeroed))
    for x, y in p.diseqs:
        if not y.is_const:
            out.append(VarVarAutomaton(x, y, zeroed))
    return out


# ---------------------------------------------------------------------------
# product exploration

def zero_substitutions(p: Problem) -> Iterator[frozenset]:
    """Variable sets whose zeroing keeps every asymmetric right side
    irreducible and is compatible with the disequalities."""
    xs = p.variables()
    for r in range(len(xs) + 1):
        for zs in itertools.combinations(xs, r):
            z = frozenset(zs)
            zeta = Substitution({x: ZERO for x in z})
            ok = all(is_irreducible_r2_ach(apply(canonicalize(e.rhs).to_term(), zeta))
                     for e in p.equations if e.asymmetric)
            ok = ok and not any(x in z and (y in z) for x, y in p.diseqs if not y.is_const)
            if ok:
                yield z


@dataclass
class Branch:
    """The product automaton for one zero substitution."""

    zeroed: frozenset
    automata: list
    start: tuple


def _branch(p: Problem, zeroed: frozenset) -> Branch:
    zeta = Substitution({x: ZERO for x in zeroed})
    autos: list = []
    for e in p.equations:
        lhs = canonicalize(apply(e.lhs, zeta))
        rhs = canonicalize(apply(e.rhs, zeta))
        if e.asymmetric:
            autos.append(SolutionAutomaton(lhs, rhs, str(e)))
        else:
            autos.append(SolutionAutomaton(lhs + rhs, CanonicalTerm(), str(e)))
    autos += build_side_automata(p, zeroed)
    return Branch(zeroed, autos, tuple(a.start for a in autos))


class ProductGraph:
    """Lazy product of solution and side automata over layer letters."""

    def __init__(self, p: Problem):
        self.p = p
        self.constants, self.fresh = _extended_constants(p)
        self.items = self.constants + [HOLD]
        self.images = [frozenset(c) for r in range(1, len(self.items) + 1)
                       for c in itertools.combinations(self.items, r)]
        self.branches = [_branch(p, z) for z in zero_substitutions(p)]
        self._succ_cache: dict = {}

    def accepting(self, b: Branch, qs: tuple) -> bool:
        return all(a.accepting(q) for a, q in zip(b.automata, qs))

    def dead(self, b: Branch, qs: tuple) -> bool:
        return any(a.dead(q) for a, q in zip(b.automata, qs))

    def successors(self, bi: int, qs: tuple) -> list[tuple[Letter, tuple]]:
        key = (bi, qs)
        if key in self._succ_cache:
            return self._succ_cache[key]
        b = self.branches[bi]
        out: list = []
        if not self.accepting(b, qs) and not self.dead(b, qs):
            need: set = set()
            for a, q in zip(b.automata, qs):
                need |= a.needs(q)
            if need:
                xs = sorted(need, key=lambda a: a.name)
                lcr = next((a for a in b.automata if isinstance(a, LcrAutomaton)), None)
                per_var = [[T for T in self.images if lcr is None or lcr.allows(x, T)] for x in xs]
                # join automaton by automaton so a failed check prunes early
                partial: list[tuple[dict, tuple]] = [({}, ())]
                order = sorted(range(len(b.automata)),
                               key=lambda i: -len(b.automata[i].needs(qs[i])))
                bound: set = set()
                for i in order:
                    a, q = b.automata[i], qs[i]
                    nd = a.needs(q)
                    new_vars = [x for x in xs if x in nd and x not in bound]
                    nxt = []
                    for binding, st in partial:
                        for combo in itertools.product(*[per_var[xs.index(x)] for x in new_vars]):
                            bd = dict(binding)
                            bd.update(zip(new_vars, combo))
                            r = a.step(q, {x: bd[x] for x in nd})
                            if r is not None:
                                nxt.append((bd, st + ((i, r),)))
                    bound |= set(new_vars)
                    partial = nxt
                    if not partial:
                        break
                rest = [x for x in xs if x not in bound]
                for binding, st in partial:
                    for combo in itertools.product(*[per_var[xs.index(x)] for x in rest]):
                        bd = dict(binding)
                        bd.update(zip(rest, combo))
                        r = [None] * len(qs)
                        for i, s in st:
                            r[i] = s
                        letter = tuple((x, bd[x]) for x in xs)
                        out.append((letter, tuple(r)))
        self._succ_cache[key] = out
        return out

    def to_dot(self, max_states: int = 10_000) -> str:
        lines = ['digraph "product" {', "  rankdir=LR;"]
        ids: dict = {}
        for bi, b in enumerate(self.branches):
            seen = {b.start}
            queue = deque([b.start])
            while queue:
                qs = queue.popleft()
                ids.setdefault((bi, qs), f"n{len(ids)}")
                for letter, r in self.successors(bi, qs):
                    ids.setdefault((bi, r), f"n{len(ids)}")
                    lines.append(f'  {ids[(bi, qs)]} -> {ids[(bi, r)]} [label="{show_letter(letter)}"];')
                    if r not in seen:
                        seen.add(r)
                        queue.append(r)
                        if len(ids) > max_states:
                            raise ExplorationBoundExceeded(max_states)
        for (bi, qs), n in ids.items():
            b = self.branches[bi]
            label = " | ".join(str(q) for a, q in zip(b.automata, qs) if isinstance(a, SolutionAutomaton))
            shape = "doublecircle" if self.accepting(b, qs) else "box"
            lines.insert(2, f'  {n} [label="{label or "-"}", shape={shape}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def explore(graph: ProductGraph, bound: int = 10_000):
    """Reachable product states of every branch, with their edges."""
    nodes: set = set()
    edges: dict = {}
    for bi, b in enumerate(graph.branches):
        start = (bi, b.start)
        if start in nodes:
            continue
        nodes.add(start)
        queue = deque([start])
        while queue:
            node = queue.popleft()
            succ = graph.successors(*node)
            edges[node] = [(letter, (node[0], r)) for letter, r in succ]
            for _, r in succ:
                nr = (node[0], r)
                if nr not in nodes:
                    nodes.add(nr)
                    if len(nodes) > bound:
                        raise ExplorationBoundExceeded(
                            f"more than {bound} product states")
                    queue.append(nr)
    return nodes, edges


def _compose_images(images: dict, letter: Letter) -> dict:
    binding = dict(letter)
    return {x: _xor(_apply_letter_mset(t, binding)) for x, t in images.items()}


def enumerate_unifiers(p: Problem, depth: int = 5, generalize: bool = True,
                       bound: int | None = None) -> Iterator[Substitution]:
    """Asymmetric unifiers read off accepted strings of length ``<= depth``,
    shortest strings first.  Each result is re-verified before it is yielded.
    """
    graph = ProductGraph(p)
    xs = p.variables()
    c = graph.fresh
    emitted: set = set()
    frontier = []
    for bi, b in enumerate(graph.branches):
        images = {x: CanonicalTerm() if x in b.zeroed else CanonicalTerm([Monomial(0, x)]) for x in xs}
        frontier.append((bi, b.start, images))
    visited = 0
    for length in range(depth + 1):
        nxt = []
        for bi, qs, images in frontier:
            b = graph.branches[bi]
            if graph.accepting(b, qs):
                sigma = Substitution({x: t.to_term() for x, t in images.items()})
                if generalize and any(c in t.atoms() for t in images.values()):
                    sigma = generalize_witness(sigma, c, p)[0]
                key = tuple((x, canonicalize(sigma.image(x))) for x in xs)
                if key in emitted:
                    continue
                emitted.add(key)
                if not is_asymmetric_unifier(p, sigma):
                    raise AssertionError(f"enumerated {sigma} is not a unifier of\n{p}")
                yield sigma
                continue
            if length == depth:
                continue
            for letter, r in graph.successors(bi, qs):
                nxt.append((bi, r, _compose_images(images, letter)))
                visited += 1
                if bound is not None and visited > bound:
                    raise ExplorationBoundExceeded(f"more than {bound} partial strings")
        frontier = nxt


@dataclass
class Classification:
    kind: str                       # "finite" | "infinite"
    count: int | None = None        # accepted strings when finite
    cycle_state: str | None = None  # a state on a cycle that can reach acceptance
    states: int = 0

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"finite({self.count})"
        return f"infinite (cycle at state {self.cycle_state})"


def classify_finitary(p: Problem, exploration_bound: int = 10_000) -> Classification:
    """Infinite iff a cycle of the product lies on a path to acceptance;
    otherwise the number of accepted strings."""
    graph = ProductGraph(p)
    nodes, edges = explore(graph, exploration_bound)
    # states that can reach acceptance
    rev: dict = {}
    for n, out in edges.items():
        for _, r in out:
            rev.setdefault(r, set()).add(n)
    good = {n for n in nodes if graph.accepting(graph.branches[n[0]], n[1])}
    queue = deque(good)
    while queue:
        n = queue.popleft()
        for m in rev.get(n, ()):
            if m not in good:
                good.add(m)
                queue.append(m)
    starts = [(bi, b.start) for bi, b in enumerate(graph.branches)]
    # cycle detection restricted to co-reachable states (iterative DFS)
    color: dict = {}
    cycle_at = None
    for s in starts:
        if s not in good or s in color:
            continue
        stack = [(s, iter(edges.get(s, ())))]
        color[s] = 1
        while stack and cycle_at is None:
            n, it = stack[-1]
            for _, r in it:
                if r not in good:
                    continue
                if color.get(r) == 1:
                    cycle_at = r
                    break
                if r not in color:
                    color[r] = 1
                    stack.append((r, iter(edges.get(r, ()))))
                    break
            else:
                color[n] = 2
                stack.pop()
        if cycle_at is not None:
            break
    if cycle_at is not None:
        b = graph.branches[cycle_at[0]]
        label = " | ".join(str(q) for a, q in zip(b.automata, cycle_at[1])
                           if isinstance(a, SolutionAutomaton))
        return Classification("infinite", cycle_state=label, states=len(nodes))
    memo: dict = {}

    def paths(n):
        if n in memo:
            return memo[n]
        if graph.accepting(graph.branches[n[0]], n[1]):
            memo[n] = 1
            return 1
        total = sum(paths(r) for _, r in edges.get(n, ()) if r in good)
        memo[n] = total
        return total

    count = sum(paths(s) for s in set(starts) if s in good)
    return Classification("finite", count=count, states=len(nodes))


# ---------------------------------------------------------------------------
# instance check

def _is_var(t) -> bool:
    return isinstance(t, Atom) and not t.is_const


def _left_null_space(masks: list[int]) -> list[int]:
    """Row combinations (as bitmasks over row indices) that sum to zero over GF(2)."""
    pivots: dict[int, tuple[int, int]] = {}
    null = []
    for i, mask in enumerate(masks):
        combo = 1 << i
        while mask:
            top = mask.bit_length() - 1
            if top not in pivots:
                pivots[top] = (mask, combo)
                break
            pm, pc = pivots[top]
            mask ^= pm
            combo ^= pc
        else:
            null.append(combo)
    return null


def _single_var(t: CanonicalTerm) -> Atom | None:
    if len(t.monomials) == 1:
        (m,) = t.monomials
        if m.degree == 0 and _is_var(m.base):
            return m.base
    return None


class InstanceChecker:
    """Decides whether ground-or-not substitutions are instances of ``sigma`` on ``xs``.

    The coefficient matrix depends only on ``sigma`` and the degree of the
    candidate, so its left null space is computed once per degree; a
    candidate is an instance iff every null vector annihilates its
    right-hand side, for every atom component.
    """

    def __init__(self, sigma: Substitution, xs: Iterable[Atom]):
        self.xs = list(xs)
        self.st = {x: canonicalize(sigma.image(x)) for x in self.xs}
        images = [_single_var(t) for t in self.st.values()]
        # sigma renames xs apart: rho sends each image to the matching theta image
        self.renaming = all(images) and len(set(images)) == len(images)
        self.unknowns = sorted({m.base for t in self.st.values() for m in t.monomials
                                if _is_var(m.base)}, key=lambda a: a.name)
        self.ds = max(max((t.degree for t in self.st.values()), default=0), 0)
        self.const_keys = {m.base for t in self.st.values() for m in t.monomials
                           if not _is_var(m.base)}
        self._null: dict[int, tuple[int, list[int]]] = {}

    def _system(self, dt: int) -> tuple[int, list[int]]:
        if dt not in self._null:
            dp = dt + self.ds + 1
            top = dp + self.ds
            col = {(v, j): i for i, (v, j) in
                   enumerate(itertools.product(self.unknowns, range(dp + 1)))}
            masks = []
            for x in self.xs:
                for d in range(top + 1):
                    mask = 0
                    for m in self.st[x].monomials:
                        j = d - m.degree
                        if _is_var(m.base) and 0 <= j <= dp:
                            mask |= 1 << col[(m.base, j)]
                    masks.append(mask)
            self._null[dt] = (top, _left_null_space(masks))
        return self._null[dt]

    def covers(self, theta: Substitution) -> bool:
        if self.renaming:
            return True
        tt = {x: canonicalize(theta.image(x)) for x in self.xs}
        dt = max(max((t.degree for t in tt.values()), default=0), 0)
        top, null = self._system(dt)
        width = top + 1
        rhs: dict[Atom, int] = {}
        for i, x in enumerate(self.xs):
            for m in tt[x].monomials:
                rhs[m.base] = rhs.get(m.base, 0) ^ (1 << (i * width + m.degree))
            for m in self.st[x].monomials:
                if not _is_var(m.base):
                    rhs[m.base] = rhs.get(m.base, 0) ^ (1 << (i * width + m.degree))
        return all((v & n).bit_count() % 2 == 0 for v in rhs.values() if v for n in null)


def is_instance(theta: Substitution, sigma: Substitution, xs: Iterable[Atom]) -> bool:
    """Is there rho with ``x sigma rho = x theta`` modulo ACUNh for all ``xs``?

    The variables of ``theta`` are treated as constants.  Each atom component
    is a linear system over GF(2) in the coefficients of the ``rho`` images.
    """
    return InstanceChecker(sigma, xs).covers(theta)
    tt = {x: canonicalize(theta.image(x)) for x in xs}
    unknowns = sorted({m.base for t in st.values() for m in t.monomials if _is_var(m.base)},
                      key=lambda a: a.name)
    keys = {m.base for t in tt.values() for m in t.monomials}
    keys |= {m.base for t in st.values() for m in t.monomials if not _is_var(m.base)}
    dt = max((t.degree for t in tt.values()), default=0)
    ds = max((t.degree for t in st.values()), default=0)
    dp = max(dt, 0) + max(ds, 0) + 1
    top = dp + max(ds, 0)
    col = {(v, j): i for i, (v, j) in enumerate(itertools.product(unknowns, range(dp + 1)))}
    for k in keys:
        rows = []
        for x in xs:
            for d in range(top + 1):
                mask = 0
                for m in st[x].monomials:
                    if not _is_var(m.base):
                        continue
                    j = d - m.degree
                    if 0 <= j <= dp:
                        mask |= 1 << col[(m.base, j)]
                rhs = int(Monomial(d, k) in tt[x].monomials)
                if not _is_var(k):
                    rhs ^= int(Monomial(d, k) in st[x].monomials)
                rows.append((mask, rhs))
        if not _solve_gf2(rows, len(col)):
            return False
    return True
