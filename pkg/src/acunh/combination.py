"""Asymmetric ACUNh unification with additional free function symbols.

The mixed problem is purified into equations that each use a single
signature.  A branch then fixes which variables are identified, a strict
order on the remaining ones and, for each, the theory that solves it.  Under
a branch each theory sees the other theory's variables as constants; the
order becomes a linear constant restriction.  The ACUNh side additionally
gets disequalities enforcing injectivity and theory preservation; the free
side is solved by syntactic unification and checked afterwards.  Solutions
of both sides are recombined along the order and re-verified.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .decision import decide_general
from .enumeration import enumerate_unifiers
from .problem import Problem, Equation, fresh_name
from .rewrite import is_asymmetric_unifier, is_irreducible_r2_ach
from .terms import (
    Atom, Term, Zero, H, Plus, App, Substitution, apply, canonicalize, plus,
    variables as term_vars,
)

__all__ = [
    "purify", "Branch", "enumerate_branches", "PureSystem", "split_system",
    "build_constrained_acunh", "syntactic_unify", "syntactic_unify_lcr",
    "decide_combined", "solve_combined", "CombinedDecision", "theory_of",
]

ACUNH, FREE, NEUTRAL = 1, 2, 0


def theory_of(t: Term) -> int:
    if isinstance(t, Atom):
        return NEUTRAL
    if isinstance(t, App):
        return FREE
    return ACUNH


# ---------------------------------------------------------------------------
# purification

class _Purifier:
    def __init__(self, p: Problem):
        self.taken = {x.name for x in p.variables()} | {c.name for c in p.constants()}
        self.out: list[Equation] = []

    def fresh(self) -> Atom:
        i = 1
        while f"v{i}" in self.taken:
            i += 1
        self.taken.add(f"v{i}")
        return Atom(f"v{i}", False)

    def abstract(self, t: Term, theory: int, side: str, asym: bool) -> Term:
        """Replace maximal subterms of the other theory in ``t`` by fresh
        variables; ``side`` decides how the defining equation is oriented."""
        if isinstance(t, (Atom, Zero)):
            return t
        own = theory_of(t)
        if own != theory and own != NEUTRAL:
            v = self.fresh()
            if side == "rhs":
                self.equation(v, t, asym)
            else:
                self.equation(t, v, asym)
            return v
        if isinstance(t, H):
            return H(self.abstract(t.arg, theory, side, asym))
        if isinstance(t, Plus):
            return plus(*(self.abstract(a, theory, side, asym) for a in t.args))
        if isinstance(t, App):
            return App(t.fn, tuple(self.abstract(a, theory, side, asym) for a in t.args))
        raise TypeError(t)

    def equation(self, s: Term, t: Term, asym: bool) -> None:
        ts, tt = theory_of(s), theory_of(t)
        if ts != NEUTRAL and tt != NEUTRAL and ts != tt:
            z = self.fresh()
            self.equation(s, z, asym)
            self.equation(z, t, asym)
            return
        th = ts or tt
        if th == NEUTRAL:
            self.out.append(Equation(s, t, asym))
            return
        s2 = self.abstract(s, th, "lhs", asym) if ts else s
        t2 = self.abstract(t, th, "rhs", asym) if tt else t
        self.out.append(Equation(s2, t2, asym))


def purify(p: Problem) -> Problem:
    """Pure equations equivalent to ``p`` up to the fresh variables.

    Left-side aliens ``s1`` become ``s1 =↓ v``, right-side aliens ``t1``
    become ``v =↓ t1``; an equation whose sides belong to different theories
    is split through a fresh middle variable.
    """
    pur = _Purifier(p)
    for e in p.equations:
        pur.equation(e.lhs, e.rhs, e.asymmetric)
    return Problem(tuple(pur.out), p.lcr, p.diseqs, p.declared_constants, p.free,
                   p.declared_vars)


def equation_theory(e: Equation) -> int:
    th = {theory_of(e.lhs), theory_of(e.rhs)} - {NEUTRAL}
    if len(th) > 1:
        raise ValueError(f"equation {e} is not pure")
    return th.pop() if th else NEUTRAL


# ---------------------------------------------------------------------------
# branches

@dataclass(frozen=True)
class Branch:
    partition: tuple[tuple[Atom, ...], ...]   # blocks; the first member represents
    ordering: tuple[Atom, ...]                # representatives, smallest first
    index: tuple[tuple[Atom, int], ...]       # representative -> 1 (ACUNh) or 2 (free)
    pins: tuple[tuple[Atom, Atom], ...] = ()  # representative -> constant it equals

    def rep(self) -> dict[Atom, Atom]:
        """Each variable's representative, or its constant for pinned blocks."""
        pin = dict(self.pins)
        return {x: pin.get(blk[0], blk[0]) for blk in self.partition for x in blk}

    def index_of(self) -> dict[Atom, int]:
        return dict(self.index)

    def lcr_key(self):
        """What the branch actually constrains: identification, indices and
        the order between representatives of different index."""
        ind = self.index_of()
        pos = {x: i for i, x in enumerate(self.ordering)}
        rel = frozenset((x, y) for x in self.ordering for y in self.ordering
                        if ind[x] != ind[y] and pos[x] < pos[y])
        return (self.partition, self.pins, self.index, rel)


def _partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def enumerate_branches(p: Problem) -> Iterator[Branch]:
    """Every partition of the variables, injective pinning of blocks to
    constants, strict order on the unpinned blocks and index map."""
    xs = p.variables()
    consts = p.constants()
    for part in sorted(_partitions(xs), key=len):
        blocks = tuple(tuple(sorted(b, key=lambda a: a.name)) for b in part)
        blocks = tuple(sorted(blocks, key=lambda b: b[0].name))
        reps = [b[0] for b in blocks]
        for pins in _pinnings(reps, consts):
            free_reps = [r for r in reps if r not in dict(pins)]
            for order in itertools.permutations(free_reps):
                for ind in itertools.product((ACUNH, FREE), repeat=len(free_reps)):
                    yield Branch(blocks, tuple(order), tuple(zip(free_reps, ind)), pins)


def _pinnings(reps: list, consts: list):
    """Partial injective maps from representatives to constants, fewest pins first."""
    out = []
    for k in range(min(len(reps), len(consts)) + 1):
        for chosen in itertools.combinations(reps, k):
            for cs in itertools.permutations(consts, k):
                out.append(tuple(zip(chosen, cs)))
    return out


@dataclass
class PureSystem:
    theory: int
    equations: tuple[Equation, ...]
    variables: tuple[Atom, ...]             # representatives solved by this theory
    constants: tuple[Atom, ...]             # other-index representatives, as constants
    lcr: tuple[tuple[Atom, Atom], ...]      # (constantified variable, variable)


class BranchRejected(Exception):
    pass


def split_system(p: Problem, b: Branch) -> tuple[PureSystem, PureSystem]:
    rep, ind = b.rep(), b.index_of()
    pos = {x: i for i, x in enumerate(b.ordering)}
    sub = Substitution({x: r for x, r in rep.items() if x != r})
    eqs = {ACUNH: [], FREE: []}
    for e in p.equations:
        e2 = Equation(apply(e.lhs, sub), apply(e.rhs, sub), e.asymmetric)
        if e.asymmetric and not is_irreducible_r2_ach(e2.rhs):
            # identified variables collide inside an asymmetric right side
            raise BranchRejected(str(b))
        th = equation_theory(e2)
        eqs[FREE if th == FREE else ACUNH].append(e2)
    out = []
    for i in (ACUNH, FREE):
        mine = tuple(x for x in b.ordering if ind[x] == i)
        other = tuple(x for x in b.ordering if ind[x] != i)
        retag = {x: x.retag(True) for x in other}
        es = tuple(Equation(_retag(e.lhs, retag), _retag(e.rhs, retag), e.asymmetric)
                   for e in eqs[i])
        lcr = tuple((retag[y], x) for x in mine for y in other if pos[x] < pos[y])
        out.append(PureSystem(i, es, mine, tuple(retag.values()), lcr))
    return out[0], out[1]


def _retag(t: Term, table: dict[Atom, Atom]) -> Term:
    if isinstance(t, Atom):
        return table.get(t, t)
    if isinstance(t, Zero):
        return t
    if isinstance(t, H):
        return H(_retag(t.arg, table))
    if isinstance(t, Plus):
        return Plus(tuple(_retag(a, table) for a in t.args))
    return App(t.fn, tuple(_retag(a, table) for a in t.args))


def build_constrained_acunh(sys: PureSystem, b: Branch) -> Problem:
    """ACUNh problem of a branch: the system's equations, the order-induced
    restrictions, and disequalities keeping distinct representatives apart
    and keeping index-1 variables off the constantified ones."""
    present_vars: set[Atom] = set()
    present_consts: set[Atom] = set()
    for e in sys.equations:
        for side in (e.lhs, e.rhs):
            for a in _atoms(side):
                (present_consts if a.is_const else present_vars).add(a)
    mine = [x for x in sys.variables if x in present_vars]
    diseqs = [(x, y) for x, y in itertools.combinations(mine, 2)]
    diseqs += [(x, c) for x in mine for c in sys.constants if c in present_consts]
    # values equal to an input constant are covered by pinned branches
    diseqs += [(x, c) for x in mine for c in sorted(present_consts, key=lambda a: a.name)
               if c not in sys.constants]
    lcr = tuple((c, x) for c, x in sys.lcr if x in present_vars)
    return Problem(sys.equations, lcr, tuple(diseqs))


def _atoms(t: Term) -> set[Atom]:
    if isinstance(t, Atom):
        return {t}
    if isinstance(t, Zero):
        return set()
    if isinstance(t, H):
        return _atoms(t.arg)
    out: set[Atom] = set()
    for a in t.args:
        out |= _atoms(a)
    return out


# ---------------------------------------------------------------------------
# free side

def _walk(t: Term, s: dict) -> Term:
    while isinstance(t, Atom) and not t.is_const and t in s:
        t = s[t]
    return t


def _occurs(x: Atom, t: Term, s: dict) -> bool:
    t = _walk(t, s)
    if t == x:
        return True
    if isinstance(t, App):
        return any(_occurs(x, a, s) for a in t.args)
    return False


def _resolve(t: Term, s: dict) -> Term:
    t = _walk(t, s)
    if isinstance(t, App):
        return App(t.fn, tuple(_resolve(a, s) for a in t.args))
    return t


def syntactic_unify(equations: Sequence[Equation]) -> Substitution | None:
    """Most general unifier over free symbols and constants, or None."""
    s: dict = {}
    stack = [(e.lhs, e.rhs) for e in equations]
    while stack:
        u, v = stack.pop()
        u, v = _walk(u, s), _walk(v, s)
        if u == v:
            continue
        if isinstance(u, Atom) and not u.is_const:
            if _occurs(u, v, s):
                return None
            s[u] = v
        elif isinstance(v, Atom) and not v.is_const:
            if _occurs(v, u, s):
                return None
            s[v] = u
        elif isinstance(u, App) and isinstance(v, App) and u.fn == v.fn and len(u.args) == len(v.args):
            stack.extend(zip(u.args, v.args))
        else:
            return None
    return Substitution({x: _resolve(x, s) for x in s})


def syntactic_unify_lcr(sys: PureSystem) -> Substitution | None:
    """The mgu of the free side if it respects the restrictions, keeps the
    representatives apart and maps none of them onto a constantified
    variable; otherwise None."""
    for e in sys.equations:
        if any(isinstance(t, (Plus, H, Zero)) for t in (e.lhs, e.rhs)):
            raise ValueError("free side contains ACUNh symbols")
    mgu = syntactic_unify(sys.equations)
    if mgu is None:
        return None
    for c, x in sys.lcr:
        if c in _atoms(mgu.image(x)):
            return None
    images = {}
    for x in sys.variables:
        t = mgu.image(x)
        if t in sys.constants or (isinstance(t, Atom) and not t.is_const and t != x):
            return None       # hits a constantified variable, or identifies two representatives
        images[x] = t
    if len(set(images.values())) != len(images):
        return None
    return mgu


# ---------------------------------------------------------------------------
# recombination and entry points

def _combine(b: Branch, s1: Substitution, s2: Substitution) -> dict[Atom, Term]:
    ind = b.index_of()
    back: dict[Atom, Term] = {}
    for x in b.ordering:
        t = (s1 if ind[x] == ACUNH else s2).image(x)
        consts = {a.retag(False): back[a.retag(False)] for a in _atoms(t)
                  if a.is_const and a.retag(False) in back}
        table = {a.retag(True): img for a, img in consts.items()}
        back[x] = canonicalize(_replace_consts(t, table)).to_term()
    return back


def _replace_consts(t: Term, table: dict[Atom, Term]) -> Term:
    if isinstance(t, Atom):
        return table.get(t, t) if t.is_const else t
    if isinstance(t, Zero):
        return t
    if isinstance(t, H):
        return H(_replace_consts(t.arg, table))
    if isinstance(t, Plus):
        return Plus(tuple(_replace_consts(a, table) for a in t.args))
    return App(t.fn, tuple(_replace_consts(a, table) for a in t.args))


def _rename_apart(s: Substitution, keep: set[Atom], taken: set[str]) -> Substitution:
    """Rename variables introduced by ``s`` (not in ``keep``) away from ``taken``."""
    extra = sorted({a for t in s.values() for a in _atoms(t) if not a.is_const and a not in keep},
                   key=lambda a: a.name)
    table = {}
    names = set(taken)
    for a in extra:
        if a.name in names:
            n = fresh_name("u", names)
            names.add(n)
            table[a] = Atom(n, False)
        else:
            names.add(a.name)
    return Substitution({x: apply(t, table) for x, t in s.items()}) if table else s


def _assemble(p: Problem, b: Branch, s1: Substitution, s2: Substitution) -> Substitution:
    taken = {x.name for blk in b.partition for x in blk} | {x.name for x in p.variables()}
    s1 = _rename_apart(s1, set(b.ordering), taken)
    back = _combine(b, s1, s2)
    back.update({c: c for _, c in b.pins})
    rep = b.rep()
    return Substitution({x: back[rep[x]] for x in p.variables() if x in rep})


@dataclass
class CombinedDecision:
    sat: bool
    witness: Substitution | None = None
    branch: Branch | None = None
    branches_tried: int = 0

    def __bool__(self):
        return self.sat


def _check_input(p: Problem) -> None:
    if (p.lcr or p.diseqs) and not p.is_pure_acunh():
        raise ValueError("restrictions and disequalities are only supported without free symbols")


def _branches(pp: Problem):
    """Branches with distinct constraints, already split."""
    seen = set()
    for b in enumerate_branches(pp):
        key = b.lcr_key()
        if key in seen:
            continue
        seen.add(key)
        try:
            s1, s2 = split_system(pp, b)
        except BranchRejected:
            continue
        yield b, s1, s2


def decide_combined(p: Problem, branch_limit: int | None = None) -> CombinedDecision:
    """Solvability of a mixed problem (pure problems go straight to the
    ACUNh decision procedure)."""
    _check_input(p)
    if p.is_pure_acunh():
        d = decide_general(p)
        return CombinedDecision(d.sat, d.general if d.sat else None)
    pp = purify(p)
    cache: dict = {}
    tried = 0
    for b, s1sys, s2sys in _branches(pp):
        tried += 1
        if branch_limit is not None and tried > branch_limit:
            break
        s2 = syntactic_unify_lcr(s2sys)
        if s2 is None:
            continue
        acu = build_constrained_acunh(s1sys, b)
        key = acu.to_text()
        if key not in cache:
            cache[key] = decide_general(acu)
        d = cache[key]
        if not d.sat:
            continue
        sigma = _assemble(p, b, d.general, s2)
        if not is_asymmetric_unifier(p, sigma):
            raise AssertionError(f"branch {b} assembled {sigma}, which fails on\n{p}")
        return CombinedDecision(True, sigma, b, tried)
    return CombinedDecision(False, branches_tried=tried)


def solve_combined(p: Problem, depth: int = 5) -> Iterator[Substitution]:
    """Unifiers of a mixed problem, branch by branch."""
    _check_input(p)
    if p.is_pure_acunh():
        yield from enumerate_unifiers(p, depth)
        return
    pp = purify(p)
    emitted = set()
    for b, s1sys, s2sys in _branches(pp):
        s2 = syntactic_unify_lcr(s2sys)
        if s2 is None:
            continue
        acu = build_constrained_acunh(s1sys, b)
        if not decide_general(acu).sat:
            continue
        for s1 in enumerate_unifiers(acu, depth):
            sigma = _assemble(p, b, s1, s2)
            key = str(sigma)
            if key in emitted:
                continue
            if not is_asymmetric_unifier(p, sigma):
                raise AssertionError(f"branch {b} assembled {sigma}, which fails on\n{p}")
            emitted.add(key)
            yield sigma
