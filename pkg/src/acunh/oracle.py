"""Brute-force ground solution search, the reference the solvers are tested against.

A ground value over constants ``k_0..k_{n-1}`` and degrees ``0..D`` is an int
with one block of bits per constant; bit ``i`` of block ``j`` is the
coefficient of ``h^i(k_j)``.  Blocks are wide enough that applying the
problem's ``h`` powers never overflows into the next block.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .problem import Problem, fresh_name
from .rewrite import rh_summands
from .terms import (
    Atom, App, Plus, Substitution, CanonicalTerm, canonicalize, plus, hpow, apply, ZERO,
)
from .terms import _atoms_of as _atoms

__all__ = ["GroundSpace", "ground_solutions", "oracle_decide", "oracle_space",
           "mixed_basis", "mixed_ground_solutions", "mixed_oracle_decide"]


@dataclass
class GroundSpace:
    constants: tuple[Atom, ...]
    degree: int      # values use degrees 0..degree
    width: int       # bits per constant block

    def bit(self, k: Atom, i: int) -> int:
        return 1 << (self.constants.index(k) * self.width + i)

    def block_mask(self, k: Atom) -> int:
        return ((1 << self.width) - 1) << (self.constants.index(k) * self.width)

    def values(self) -> list[int]:
        """All values, fewest monomials first."""
        n = len(self.constants) * (self.degree + 1)
        dense = sorted(range(1 << n), key=lambda v: (bin(v).count("1"), v))
        out = []
        for v in dense:
            val = 0
            for j in range(n):
                if v >> j & 1:
                    blk, i = divmod(j, self.degree + 1)
                    val |= 1 << (blk * self.width + i)
            out.append(val)
        return out

    def to_term(self, val: int):
        mons = []
        for j, k in enumerate(self.constants):
            for i in range(self.width):
                if val >> (j * self.width + i) & 1:
                    mons.append(hpow(k, i))
        return plus(*mons) if mons else ZERO


def _max_shift(p: Problem) -> int:
    d = 0
    for e in p.equations:
        for side in (e.lhs, e.rhs):
            d = max(d, canonicalize(side).degree)
    return d


def oracle_space(p: Problem, degree: int, extra: Sequence[str] = ()) -> GroundSpace:
    consts = tuple(p.constants()) + tuple(Atom(n, True) for n in extra)
    return GroundSpace(consts, degree, degree + _max_shift(p) + 1)


class _Compiled:
    """Linear part of every equation as per-variable shift lists."""

    def __init__(self, p: Problem, space: GroundSpace, xs: list[Atom]):
        self.space = space
        self.xs = xs
        self.lin = []       # per equation: (const_bits, {var: [shifts]})
        self.asym = []      # per asymmetric equation: [(kind, payload, shift)]
        for e in p.equations:
            both = canonicalize(e.lhs) + canonicalize(e.rhs)
            cb, sh = 0, {}
            for m in both.monomials:
                if m.base.is_const:
                    cb ^= space.bit(m.base, m.degree)
                else:
                    sh.setdefault(m.base, []).append(m.degree)
            self.lin.append((cb, sh))
            if e.asymmetric:
                rhs = canonicalize(e.rhs).sorted()
                single_var = len(rhs) == 1 and rhs[0].degree == 0
                self.asym.append((rhs, single_var))
        self.lcr = [(space.block_mask(c), x) for c, x in p.lcr]
        self.diseqs = [(x, y) for x, y in p.diseqs]

    def contribution(self, eq: int, x: Atom, val: int) -> int:
        out = 0
        for s in self.lin[eq][1].get(x, ()):
            out ^= val << s
        return out

    def nonlinear_ok(self, env: dict[Atom, int]) -> bool:
        sp = self.space
        for rhs, single_var in self.asym:
            used = 0
            for m in rhs:
                v = sp.bit(m.base, m.degree) if m.base.is_const else env[m.base] << m.degree
                if v == 0:
                    if single_var:
                        continue
                    return False
                if used & v:
                    return False
                used |= v
        for mask, x in self.lcr:
            if env[x] & mask:
                return False
        for x, y in self.diseqs:
            vy = sp.bit(y, 0) if y.is_const else env[y]
            if env[x] == vy:
                return False
        return True


def ground_solutions(p: Problem, degree: int = 3, extra_constants: Sequence[str] = (),
                     limit: int | None = None) -> Iterator[Substitution]:
    """Every ground asymmetric unifier of ``p`` with images in ``H_degree``
    over the constants of ``p`` plus ``extra_constants``."""
    space = oracle_space(p, degree, extra_constants)
    xs = p.variables()
    comp = _Compiled(p, space, xs)
    values = space.values()
    n_eq = len(comp.lin)
    base_key = tuple(cb for cb, _ in comp.lin)
    count = 0

    def emit(env):
        return Substitution({x: space.to_term(v) for x, v in env.items()})

    if not xs:
        if all(k == 0 for k in base_key) and comp.nonlinear_ok({}):
            yield Substitution({})
        return
    last, rest = xs[-1], xs[:-1]
    index: dict[tuple, list[int]] = {}
    for v in values:
        key = tuple(comp.contribution(e, last, v) for e in range(n_eq))
        index.setdefault(key, []).append(v)
    for combo in itertools.product(values, repeat=len(rest)):
        key = list(base_key)
        for x, v in zip(rest, combo):
            for e in range(n_eq):
                key[e] ^= comp.contribution(e, x, v)
        for v in index.get(tuple(key), ()):
            env = dict(zip(rest, combo))
            env[last] = v
            if comp.nonlinear_ok(env):
                yield emit(env)
                count += 1
                if limit is not None and count >= limit:
                    return


def oracle_decide(p: Problem, degree: int = 3) -> bool:
    """Ground solvability over the constants of ``p`` plus one fresh constant."""
    taken = {c.name for c in p.constants()} | {x.name for x in p.variables()}
    c = fresh_name("c", taken)
    return next(ground_solutions(p, degree, [c], limit=1), None) is not None


# ---------------------------------------------------------------------------
# mixed terms

def mixed_basis(p: Problem, extra: Sequence[str] = (), degree: int = 1) -> list:
    """Ground monomials for the mixed search.

    ``h^i(k)`` for every constant ``k`` and ``i <= degree``, then ``h^i(f(u))``
    for every unary free symbol ``f`` where ``u`` is ``0``, a sum of at most
    two of those constant monomials, or ``g(0)`` / ``g(k)`` for a free ``g``.
    """
    consts = list(p.constants()) + [Atom(n, True) for n in extra]
    level0 = [hpow(k, i) for k in consts for i in range(degree + 1)]
    fns = sorted(p.free_symbols().items())
    if any(arity != 1 for _, arity in fns):
        raise ValueError("the mixed oracle handles unary free symbols only")
    args = [ZERO] + [canonicalize(plus(*c)).to_term()
                     for r in (1, 2) for c in itertools.combinations(level0, r)]
    inner = [App(g, (u,)) for g, _ in fns for u in [ZERO] + consts]
    atoms = [App(fn, (u,)) for fn, _ in fns for u in args + inner]
    return level0 + [hpow(a, i) for a in atoms for i in range(degree + 1)]


def _summand_groups(e) -> dict:
    """Rh summands of ``lhs + rhs`` grouped by the variables they contain."""
    groups: dict = {}
    for d, base in rh_summands(Plus((e.lhs, e.rhs))):
        key = frozenset(a for a in _atoms(base) if not a.is_const)
        groups.setdefault(key, []).append(hpow(base, d))
    return groups


def mixed_ground_solutions(p: Problem, extra_constants: Sequence[str] = (), degree: int = 1,
                           limit: int | None = None, max_summands: int = 2
                           ) -> Iterator[Substitution]:
    """Ground unifiers whose images are sums of at most ``max_summands``
    :func:`mixed_basis` monomials.

    When every summand of every equation mentions at most one variable the
    search joins on per-variable contributions; otherwise it enumerates all
    assignments.
    """
    from .rewrite import is_asymmetric_unifier

    basis = mixed_basis(p, extra_constants, degree)
    values = [canonicalize(plus(*combo)).to_term()
              for r in range(max_summands + 1) for combo in itertools.combinations(basis, r)]
    xs = p.variables()
    groups = [_summand_groups(e) for e in p.equations]
    separable = all(len(k) <= 1 for g in groups for k in g)
    count = 0

    def contrib(g, x, v):
        ts = g.get(frozenset({x}), [])
        return canonicalize(apply(plus(*ts), {x: v})) if ts else CanonicalTerm()

    if not xs:
        cands = [()]
    elif separable:
        last, rest = xs[-1], xs[:-1]
        index: dict = {}
        for v in values:
            key = tuple(contrib(g, last, v) for g in groups)
            index.setdefault(key, []).append(v)
        base = tuple(canonicalize(plus(*g.get(frozenset(), []))) for g in groups)

        def gen():
            for combo in itertools.product(values, repeat=len(rest)):
                key = list(base)
                for x, v in zip(rest, combo):
                    key = [k + contrib(g, x, v) for k, g in zip(key, groups)]
                for v in index.get(tuple(key), ()):
                    yield combo + (v,)
        cands = gen()
    else:
        cands = itertools.product(values, repeat=len(xs))
    for combo in cands:
        sigma = Substitution(dict(zip(xs, combo)))
        if is_asymmetric_unifier(p, sigma):
            yield sigma
            count += 1
            if limit is not None and count >= limit:
                return


def mixed_oracle_decide(p: Problem, degree: int = 1) -> bool:
    taken = {c.name for c in p.constants()} | {x.name for x in p.variables()}
    c = fresh_name("c", taken)
    return next(mixed_ground_solutions(p, [c], degree, limit=1), None) is not None
