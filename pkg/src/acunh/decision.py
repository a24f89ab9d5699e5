"""Automata-based decision procedure for asymmetric ACUNh unification.

Pipeline: flatten every equation into standard-form constraints, split every
variable into one component per constant, guess which components of
asymmetric operands vanish and which component witnesses each disequality,
then check each constant's component system for emptiness with track
automata.  General solvability adds one fresh constant; ground witnesses over
it are abstracted back into non-ground unifiers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .automata import TrackDfa, intersect, find_witness, Word
from .problem import Problem, Equation, fresh_name
from .rewrite import is_asymmetric_unifier
from .terms import (
    Atom, Term, Monomial, CanonicalTerm, Substitution, canonicalize, plus, hpow,
    ZERO, apply,
)

__all__ = [
    "StdEquation", "StdSystem", "standardize", "build_equation_dfa",
    "build_diseq_dfa", "decode_witness", "ComponentPlan", "Decision",
    "decide_single_constant", "decide_multi_constant", "decide_general",
    "generalize_witness", "component_automata", "FRESH_CONSTANT",
    "XOR", "XOR_ASYM", "HSHIFT", "HSHIFT_ASYM", "CONST_DEF", "VAR_NEQ",
    "CONST_NEQ", "EQ", "ZERO_K", "NONZERO",
]

XOR, XOR_ASYM = "xor", "xor_asym"
HSHIFT, HSHIFT_ASYM = "hshift", "hshift_asym"
CONST_DEF, VAR_NEQ, CONST_NEQ = "const_def", "var_neq", "const_neq"
EQ, ZERO_K, NONZERO = "eq", "zero", "nonzero"

FRESH_CONSTANT = "c"


@dataclass(frozen=True)
class StdEquation:
    kind: str
    operands: tuple[str, ...]
    exponent: int = 0  # only for const_def: X = h^exponent(constant)

    def __str__(self) -> str:
        if self.kind == CONST_DEF:
            x, k = self.operands
            return f"{self.kind}({x}, h^{self.exponent}({k}))" if self.exponent else f"{self.kind}({x}, {k})"
        return f"{self.kind}({', '.join(self.operands)})"


@dataclass
class StdSystem:
    equations: list[StdEquation]
    fresh: list[str]
    variables: list[str]            # variables of the source problem
    lcr: list[tuple[str, str]]      # (constant, variable)

    def all_variables(self) -> list[str]:
        return self.variables + self.fresh


# ---------------------------------------------------------------------------
# standard form

class _Flattener:
    def __init__(self, taken: Iterable[str]):
        self.taken = set(taken)
        self.out: list[StdEquation] = []
        self.fresh: list[str] = []

    def new(self) -> str:
        i = len(self.fresh) + 1
        n = f"F{i}"
        while n in self.taken:
            i += 1
            n = f"F{i}"
        self.taken.add(n)
        self.fresh.append(n)
        return n

    def emit(self, kind: str, ops: Sequence[str], exponent: int = 0) -> None:
        ops = list(ops)
        # track automata need distinct tracks; duplicate operands get a copy
        n_vars = len(ops) - 1 if kind in (CONST_DEF, CONST_NEQ) else len(ops)
        for i in range(1, n_vars):
            if ops[i] in ops[:i]:
                copy = self.new()
                self.out.append(StdEquation(EQ, (copy, ops[i])))
                ops[i] = copy
        self.out.append(StdEquation(kind, tuple(ops), exponent))

    def name(self, mons: list[Monomial], asym: bool) -> str:
        if len(mons) == 1 and mons[0].degree == 0 and _is_var(mons[0].base):
            return mons[0].base.name
        target_children = self._children(mons, asym)
        target = self.new()
        self._define_from(target, mons, asym, target_children)
        return target

    def define(self, target: str, mons: list[Monomial], asym: bool) -> None:
        if len(mons) == 1 and mons[0].degree == 0 and _is_var(mons[0].base):
            if mons[0].base.name != target:
                self.emit(EQ, (target, mons[0].base.name))
            return
        children = self._children(mons, asym)
        self._define_from(target, mons, asym, children)

    def _children(self, mons, asym):
        if not mons:
            return None
        if len(mons) == 1:
            m = mons[0]
            if not _is_var(m.base):
                return None
            return self.name([m.shift(-1)], asym)
        return (self.name(mons[:1], asym), self.name(mons[1:], asym))

    def _define_from(self, target, mons, asym, children):
        if not mons:
            self.emit(ZERO_K, (target,))
        elif len(mons) == 1:
            m = mons[0]
            if not _is_var(m.base):
                if not (isinstance(m.base, Atom) and m.base.is_const):
                    raise ValueError("free function symbols need the combination procedure")
                self.emit(CONST_DEF, (target, m.base.name), m.degree)
            else:
                self.emit(HSHIFT_ASYM if asym else HSHIFT, (target, children))
        else:
            self.emit(XOR_ASYM if asym else XOR, (target,) + children)


def _is_var(t: Term) -> bool:
    return isinstance(t, Atom) and not t.is_const


def standardize(p: Problem) -> StdSystem:
    """Flatten ``p`` into standard-form constraints over fresh variables."""
    vars_ = [x.name for x in p.variables()]
    fl = _Flattener(vars_ + [c.name for c in p.constants()])
    for e in p.equations:
        lhs = canonicalize(e.lhs).sorted()
        rhs = canonicalize(e.rhs).sorted()
        left = fl.name(lhs, False) if lhs else None
        if left is None:
            left = fl.new()
            fl.emit(ZERO_K, (left,))
        fl.define(left, rhs, e.asymmetric)
    for x, y in p.diseqs:
        if y.is_const:
            fl.emit(CONST_NEQ, (x.name, y.name))
        else:
            fl.emit(VAR_NEQ, (x.name, y.name))
    lcr = [(c.name, x.name) for c, x in p.lcr]
    return StdSystem(fl.out, fl.fresh, vars_, lcr)


# ---------------------------------------------------------------------------
# automata for single constraints

def _dfa(tracks, start, accepting, edges, name) -> TrackDfa:
    delta = {}
    for q, cols, r in edges:
        for col in cols:
            delta[(q, tuple(int(ch) for ch in col))] = r
    return TrackDfa(tuple(tracks), start, frozenset(accepting), delta, name)


def xor_dfa(p: str, q: str, r: str) -> TrackDfa:
    """P = Q + R, tracks (P, Q, R): bitwise parity, one state."""
    return _dfa((p, q, r), "q0", {"q0"}, [("q0", ["000", "011", "101", "110"], "q0")],
                f"{p} = {q} + {r}")


def xor_asym_dfa(p: str, q: str, r: str) -> TrackDfa:
    """P =↓ Q + R: parity, Q and R disjoint and both nonzero."""
    edges = [
        ("q0", ["000"], "q0"), ("q0", ["110"], "q1"), ("q0", ["101"], "q3"),
        ("q1", ["000", "110"], "q1"), ("q1", ["101"], "q2"),
        ("q3", ["000", "101"], "q3"), ("q3", ["110"], "q2"),
        ("q2", ["000", "101", "110"], "q2"),
    ]
    return _dfa((p, q, r), "q0", {"q2"}, edges, f"{p} =↓ {q} + {r}")


def hshift_dfa(x: str, y: str) -> TrackDfa:
    """X = h(Y), tracks (Y, X); the state remembers the previous Y bit."""
    edges = [("q0", ["00"], "q0"), ("q0", ["10"], "q1"),
             ("q1", ["11"], "q1"), ("q1", ["01"], "q0")]
    return _dfa((y, x), "q0", {"q0"}, edges, f"{x} = h({y})")


def hshift_asym_dfa(x: str, y: str) -> TrackDfa:
    """X =↓ h(Y), tracks (Y, X): as X = h(Y) with Y nonzero."""
    edges = [("q0", ["00"], "q0"), ("q0", ["10"], "q1"),
             ("q1", ["11"], "q1"), ("q1", ["01"], "q2"),
             ("q2", ["00"], "q2"), ("q2", ["10"], "q1")]
    return _dfa((y, x), "q0", {"q2"}, edges, f"{x} =↓ h({y})")


def var_neq_dfa(x: str, y: str) -> TrackDfa:
    edges = [("q0", ["00", "11"], "q0"), ("q0", ["10", "01"], "q1"),
             ("q1", ["00", "01", "10", "11"], "q1")]
    return _dfa((x, y), "q0", {"q1"}, edges, f"{x} != {y}")


def const_neq_dfa(x: str, k: str) -> TrackDfa:
    """X differs from the unit string ``1`` (the value of the constant)."""
    edges = [("q0", ["0"], "q1"), ("q0", ["1"], "q2"),
             ("q2", ["0"], "q2"), ("q2", ["1"], "q1"),
             ("q1", ["0", "1"], "q1")]
    return _dfa((x,), "q0", {"q1"}, edges, f"{x} != {k}")


def unit_dfa(x: str, i: int, k: str = "") -> TrackDfa:
    """X = h^i(k) on k's component: a single 1 at position i."""
    edges = [(f"s{j}", ["0"], f"s{j + 1}") for j in range(i)]
    edges += [(f"s{i}", ["1"], f"s{i + 1}"), (f"s{i + 1}", ["0"], f"s{i + 1}")]
    label = f"{x} = h^{i}({k})" if k else f"{x} = unit {i}"
    return _dfa((x,), "s0", {f"s{i + 1}"}, edges, label)


def zero_dfa(x: str) -> TrackDfa:
    return _dfa((x,), "q0", {"q0"}, [("q0", ["0"], "q0")], f"{x} = 0")


def nonzero_dfa(x: str) -> TrackDfa:
    edges = [("q0", ["0"], "q0"), ("q0", ["1"], "q1"), ("q1", ["0", "1"], "q1")]
    return _dfa((x,), "q0", {"q1"}, edges, f"{x} != 0")


def eq_dfa(x: str, y: str) -> TrackDfa:
    return _dfa((x, y), "q0", {"q0"}, [("q0", ["00", "11"], "q0")], f"{x} = {y}")


def build_equation_dfa(e: StdEquation) -> TrackDfa:
    k = e.kind
    if k == XOR:
        return xor_dfa(*e.operands)
    if k == XOR_ASYM:
        return xor_asym_dfa(*e.operands)
    if k == HSHIFT:
        return hshift_dfa(*e.operands)
    if k == HSHIFT_ASYM:
        return hshift_asym_dfa(*e.operands)
    if k == CONST_DEF:
        return unit_dfa(e.operands[0], e.exponent, e.operands[1])
    if k == EQ:
        return eq_dfa(*e.operands)
    if k == ZERO_K:
        return zero_dfa(*e.operands)
    if k == NONZERO:
        return nonzero_dfa(*e.operands)
    raise ValueError(f"{k} is not an equation kind; use build_diseq_dfa")


def build_diseq_dfa(e: StdEquation) -> TrackDfa:
    if e.kind == VAR_NEQ:
        return var_neq_dfa(*e.operands)
    if e.kind == CONST_NEQ:
        return const_neq_dfa(*e.operands)
    raise ValueError(f"{e.kind} is not a disequality kind")


def decode_witness(word: Word, order: Sequence[str], constant: str | Atom) -> Substitution:
    """Variable ``order[j]`` gets the sum of ``h^i(constant)`` over the
    positions ``i`` where its track holds a 1."""
    k = constant if isinstance(constant, Atom) else Atom(constant, True)
    out = {}
    for j, x in enumerate(order):
        mons = [hpow(k, i) for i, col in enumerate(word) if col[j]]
        out[Atom(x, False)] = plus(*mons)
    return Substitution(out)


# ---------------------------------------------------------------------------
# component plans

@dataclass(frozen=True)
class ComponentPlan:
    """Which components of the asymmetric operands are zero, and which
    constant's component witnesses each disequality."""

    constants: tuple[str, ...]
    zero_guess: dict = field(hash=False)   # (variable, constant) -> "zero" | "nonzero"
    witnesses: dict = field(hash=False)    # disequality index -> constant

    def __str__(self) -> str:
        nz = sorted(f"{x}^{k}" for (x, k), g in self.zero_guess.items() if g == "nonzero")
        return f"nonzero: {', '.join(nz) or '-'}; witnesses: {self.witnesses}"


def _guessed(system: StdSystem) -> list[str]:
    out: list[str] = []
    for e in system.equations:
        ops = e.operands[1:] if e.kind in (XOR_ASYM, HSHIFT_ASYM) else ()
        out.extend(v for v in ops if v not in out)
    return out


def _diseqs(system: StdSystem) -> list[StdEquation]:
    return [e for e in system.equations if e.kind in (VAR_NEQ, CONST_NEQ)]


def component_automata(system: StdSystem, k: str, nonzero: frozenset,
                       witnessed: frozenset) -> list[TrackDfa]:
    """Automata for constant ``k``'s component under one local guess."""
    out: list[TrackDfa] = []
    diseqs = _diseqs(system)
    for e in system.equations:
        kind, ops = e.kind, e.operands
        if kind == XOR_ASYM:
            p, q, r = ops
            nq, nr = q in nonzero, r in nonzero
            if nq and nr:
                out.append(xor_asym_dfa(p, q, r))
            elif nq:
                out += [zero_dfa(r), eq_dfa(p, q), nonzero_dfa(q)]
            elif nr:
                out += [zero_dfa(q), eq_dfa(p, r), nonzero_dfa(r)]
            else:
                out += [zero_dfa(p), zero_dfa(q), zero_dfa(r)]
        elif kind == HSHIFT_ASYM:
            x, y = ops
            out += [hshift_asym_dfa(x, y)] if y in nonzero else [zero_dfa(x), zero_dfa(y)]
        elif kind == CONST_DEF:
            x, c = ops
            out.append(unit_dfa(x, e.exponent, c) if c == k else zero_dfa(x))
        elif kind in (VAR_NEQ, CONST_NEQ):
            if diseqs.index(e) in witnessed:
                if kind == VAR_NEQ:
                    out.append(var_neq_dfa(*ops))
                elif ops[1] == k:
                    out.append(const_neq_dfa(*ops))
                else:
                    out.append(nonzero_dfa(ops[0]))
        else:
            out.append(build_equation_dfa(e))
    for c, x in system.lcr:
        if c == k:
            out.append(zero_dfa(x))
    return out


@dataclass
class Decision:
    sat: bool
    witness: Substitution | None = None       # ground, over `constants`
    constants: tuple[str, ...] = ()
    plan: ComponentPlan | None = None
    general: Substitution | None = None      # witness with the fresh constant abstracted

    def __bool__(self) -> bool:
        return self.sat


class _Solver:
    def __init__(self, p: Problem, constants: Sequence[str]):
        self.p = p
        self.system = standardize(p)
        self.constants = tuple(constants)
        self.guessed = _guessed(self.system)
        self.diseqs = _diseqs(self.system)
        self.cache: dict = {}

    def local(self, k, nonzero, witnessed):
        key = (k, nonzero, witnessed)
        if key not in self.cache:
            dfas = component_automata(self.system, k, nonzero, witnessed)
            if not dfas:
                self.cache[key] = ((), ())
            else:
                prod = intersect(dfas)
                w = find_witness(prod)
                self.cache[key] = None if w is None else (w, prod.tracks)
        return self.cache[key]

    def local_options(self, k):
        """Local guesses for constant k, most demanding first."""
        g, d = self.guessed, range(len(self.diseqs))
        opts = []
        for nz in itertools.product((True, False), repeat=len(g)):
            for wt in itertools.product((True, False), repeat=len(self.diseqs)):
                opts.append((frozenset(v for v, b in zip(g, nz) if b),
                             frozenset(j for j, b in zip(d, wt) if b)))
        return opts

    def search(self):
        need_v = set(self.guessed)
        need_d = set(range(len(self.diseqs)))
        consts = self.constants
        chosen: list = []

        def rec(i, need_v, need_d):
            if i == len(consts):
                return not need_v and not need_d
            k = consts[i]
            last = i == len(consts) - 1
            for nz, wt in self.local_options(k):
                if last and (not need_v <= nz or not need_d <= wt):
                    continue
                if self.local(k, nz, wt) is None:
                    continue
                chosen.append((k, nz, wt))
                if rec(i + 1, need_v - nz, need_d - wt):
                    return True
                chosen.pop()
            return False

        if not consts:
            return None
        return chosen if rec(0, need_v, need_d) else None


def decide_multi_constant(p: Problem, constants: Sequence[str] | None = None) -> Decision:
    """Ground solvability over ``constants`` (default: those of ``p``)."""
    if constants is None:
        constants = [c.name for c in p.constants()]
    if not constants:
        constants = [FRESH_CONSTANT]
    s = _Solver(p, constants)
    chosen = s.search()
    if chosen is None:
        return Decision(False, constants=tuple(constants))
    images: dict[Atom, list[Term]] = {Atom(x, False): [] for x in s.system.variables}
    zero_guess, witnesses = {}, {}
    for k, nz, wt in chosen:
        w, tracks = s.local(k, nz, wt)
        part = decode_witness(w, tracks, k)
        for x in images:
            images[x].append(part.image(x) if x in part else ZERO)
        for v in s.guessed:
            zero_guess[(v, k)] = "nonzero" if v in nz else "zero"
        for j in wt:
            witnesses.setdefault(j, k)
    sigma = Substitution({x: canonicalize(plus(*ts)).to_term() for x, ts in images.items()})
    plan = ComponentPlan(tuple(constants), zero_guess, witnesses)
    if not is_asymmetric_unifier(p, sigma):
        raise AssertionError(f"decoded witness {sigma} fails verification for\n{p}")
    return Decision(True, sigma, tuple(constants), plan)


def decide_single_constant(p: Problem) -> Decision:
    consts = [c.name for c in p.constants()]
    if len(consts) > 1:
        raise ValueError("problem mentions more than one constant")
    return decide_multi_constant(p, consts or [FRESH_CONSTANT])


def decide_general(p: Problem) -> Decision:
    """Solvability of ``p`` over arbitrary terms: ground solvability over the
    constants of ``p`` plus one fresh constant.  The declared constants are
    tried alone first, which keeps witnesses free of the fresh constant when
    possible."""
    if not p.is_pure_acunh():
        raise ValueError("problem has free symbols; use the combination procedure")
    names = [c.name for c in p.constants()]
    taken = set(names) | {x.name for x in p.variables()}
    c = fresh_name(FRESH_CONSTANT, taken)
    if names:
        d = decide_multi_constant(p, names)
        if d.sat:
            d.general = d.witness
            return d
    d = decide_multi_constant(p, names + [c])
    if d.sat:
        d.general = generalize_witness(d.witness, c, p)[0]
    return d


# ---------------------------------------------------------------------------
# abstraction of the fresh constant

def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def generalize_witness(sigma: Substitution, c: str | Atom, p: Problem,
                       max_exhaustive: int = 6) -> list[Substitution]:
    """Replace the ``h^j(c)`` monomials of ``sigma`` by fresh variables.

    The degrees of ``c`` occurring in ``sigma`` are split into blocks; each
    block gets a fresh variable ``v`` standing for ``h^m(c)`` with ``m`` the
    block's least degree.  Abstractions that are still asymmetric unifiers of
    ``p`` are returned, finest split first.  The single-block abstraction is
    always among them.
    """
    c = c if isinstance(c, Atom) else Atom(c, True)
    canon = {x: canonicalize(t) for x, t in sigma.items()}
    degs = sorted({m.degree for t in canon.values() for m in t.monomials if m.base == c})
    if not degs:
        return [sigma]
    taken = {x.name for x in p.variables()} | {k.name for k in p.constants()}
    taken |= {a.name for t in canon.values() for a in t.atoms()}
    if len(degs) > max_exhaustive:
        partitions = [[degs]]
    else:
        partitions = sorted(_set_partitions(degs), key=lambda b: (-len(b), b))
    out: list[Substitution] = []
    for blocks in partitions:
        names = []
        t2 = set(taken)
        for _ in blocks:
            n = fresh_name("v", t2)
            t2.add(n)
            names.append(Atom(n, False))
        where = {}
        for b, v in zip(blocks, names):
            m = min(b)
            for d in b:
                where[d] = Monomial(d - m, v)
        cand = {}
        for x, t in canon.items():
            mons = [where[m.degree] if m.base == c else m for m in t.monomials]
            cand[x] = CanonicalTerm.xor([[m] for m in mons]).to_term()
        theta = Substitution(cand)
        if is_asymmetric_unifier(p, theta):
            out.append(theta)
    return out
