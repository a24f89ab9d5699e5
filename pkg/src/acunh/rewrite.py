"""Rewriting with R2 = {x+x -> 0, x+0 -> x, x+(y+x) -> y, h(0) -> 0} modulo ACh.

ACh-equality is AC-equality of Rh-normal forms (Rh: h(x+y) -> h(x)+h(y)), so
irreducibility is checked on the Rh-normal form: a term is R2,ACh-irreducible
iff that form has no ``h^i(0)`` with ``i >= 1``, no sum with a ``0`` summand
and no sum with two AC-equal summands.  :func:`ach_match_bruteforce` is the
exponential reference matcher the fast check is tested against.
"""
from __future__ import annotations

import itertools
import random
from enum import Enum
from typing import Iterator

from .terms import (
    Term, Zero, Atom, H, Plus, App, ZERO, plus, hpow, canonicalize, apply,
    Substitution, CanonicalTerm,
)

__all__ = [
    "Decomposition", "normalize_rh", "rh_summands", "ac_key",
    "is_irreducible_r2_ach", "is_asymmetric_unifier", "termination_weight",
    "ach_match_bruteforce", "BoundExceeded", "R2_RULES", "r2_steps", "flatten_sums",
    "has_r2_redex_bruteforce", "r1_random_normalize", "normalize_r2_ach_bruteforce",
    "positions", "replace_at",
]


class Decomposition(Enum):
    R1_MOD_AC = "R1_mod_AC"
    R2_MOD_ACH = "R2_mod_ACh"
    RH_MOD_AC = "Rh_mod_AC"


class BoundExceeded(RuntimeError):
    """The brute-force matcher hit its candidate budget."""


# ---------------------------------------------------------------------------
# Rh normal form

def rh_summands(t: Term, shift: int = 0) -> list[tuple[int, Term]]:
    """Summands ``(degree, base)`` of the Rh-normal form of ``t``.

    ``base`` is an atom, ``0`` or a free application whose arguments are
    Rh-normal.  Duplicates and zeros are kept.
    """
    if isinstance(t, (Zero, Atom)):
        return [(shift, t)]
    if isinstance(t, H):
        return rh_summands(t.arg, shift + 1)
    if isinstance(t, Plus):
        out = []
        for a in t.args:
            out.extend(rh_summands(a, shift))
        return out
    if isinstance(t, App):
        return [(shift, App(t.fn, tuple(normalize_rh(a) for a in t.args)))]
    raise TypeError(t)


def normalize_rh(t: Term) -> Term:
    """Fixpoint of h(x+y) -> h(x)+h(y) modulo AC (summands sorted)."""
    summ = sorted(rh_summands(t), key=_summand_key)
    return plus(*(hpow(b, d) for d, b in summ))


def _base_key(b: Term):
    if isinstance(b, Atom):
        return (1, b.name, b.is_const)
    if isinstance(b, Zero):
        return (0,)
    if isinstance(b, App):
        return (2, b.fn, tuple(_sum_key(a) for a in b.args))
    raise TypeError(b)


def _summand_key(s: tuple[int, Term]):
    return (s[0], _base_key(s[1]))


def _sum_key(t: Term):
    return tuple(sorted(_summand_key(s) for s in rh_summands(t)))


def ac_key(t: Term):
    """Hashable key with ``ac_key(s) == ac_key(t)`` iff s =ACh t."""
    return _sum_key(t)


# ---------------------------------------------------------------------------
# irreducibility

def is_irreducible_r2_ach(t: Term) -> bool:
    """True iff ``t`` has no R2 redex modulo ACh at any position."""
    return _irreducible_summands(rh_summands(t))


def _irreducible_summands(summ: list[tuple[int, Term]]) -> bool:
    if len(summ) > 1:
        keys = [_summand_key(s) for s in summ]
        if len(set(keys)) != len(keys):
            return False
    for d, b in summ:
        if isinstance(b, Zero) and (d >= 1 or len(summ) > 1):
            return False
        if isinstance(b, App):
            for a in b.args:
                if not _irreducible_summands(rh_summands(a)):
                    return False
    return True


def is_asymmetric_unifier(problem, sigma) -> bool:
    """Check a substitution against every constraint of ``problem``.

    Equations must hold modulo ACUNh; for asymmetric ones the instance of the
    normalized right-hand side must be R2,ACh-irreducible.  Restrictions
    ``(c, x)`` forbid ``c`` in the normal form of ``x sigma``; disequalities
    compare normal forms.
    """
    for e in problem.equations:
        if canonicalize(apply(e.lhs, sigma)) != canonicalize(apply(e.rhs, sigma)):
            return False
        if e.asymmetric:
            rhs_nf = canonicalize(e.rhs).to_term()
            if not is_irreducible_r2_ach(apply(rhs_nf, sigma)):
                return False
    for c, x in problem.lcr:
        if c in canonicalize(apply(x, sigma)).atoms():
            return False
    for x, y in problem.diseqs:
        if canonicalize(apply(x, sigma)) == canonicalize(apply(y, sigma)):
            return False
    return True


# ---------------------------------------------------------------------------
# termination measure

def termination_weight(t: Term) -> int:
    """Polynomial interpretation h -> 2X, 0 -> 1, + -> X+Y; atoms count 2."""
    if isinstance(t, Zero):
        return 1
    if isinstance(t, Atom):
        return 2
    if isinstance(t, H):
        return 2 * termination_weight(t.arg)
    if isinstance(t, Plus):
        return sum(termination_weight(a) for a in t.args)
    if isinstance(t, App):
        return 1 + sum(termination_weight(a) for a in t.args)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# brute-force ACh matching

_X, _Y = Atom("x"), Atom("y")
R2_RULES: tuple[tuple[Term, Term], ...] = (
    (Plus((_X, _X)), ZERO),
    (Plus((_X, ZERO)), _X),
    (Plus((_X, _Y, _X)), _Y),
    (H(ZERO), ZERO),
)


def ach_match_bruteforce(pattern: Term, subject: Term, bound: int = 100_000):
    """Find sigma with ``pattern sigma =ACh subject`` by trying every
    assignment of subject summands to pattern summands.

    Variables of ``subject`` are treated as rigid.  Returns a
    :class:`Substitution` or ``None``; raises :class:`BoundExceeded` when more
    than ``bound`` assignments would be needed.
    """
    pat = rh_summands(pattern)
    subj = rh_summands(subject)
    k, n = len(pat), len(subj)
    if k > n:
        return None
    if k ** n > bound:
        raise BoundExceeded(f"{k}^{n} candidate assignments exceed bound {bound}")
    subj_keys = [_summand_key(s) for s in subj]
    for assign in itertools.product(range(k), repeat=n):
        groups: list[list[int]] = [[] for _ in range(k)]
        for i, slot in enumerate(assign):
            groups[slot].append(i)
        if any(not g for g in groups):
            continue
        sigma = _check_groups(pat, subj, subj_keys, groups)
        if sigma is not None:
            return sigma
    return None


def _check_groups(pat, subj, subj_keys, groups):
    binding: dict[Atom, tuple] = {}
    for (pd, pb), g in zip(pat, groups):
        if isinstance(pb, Atom) and not pb.is_const:
            if any(subj[i][0] < pd for i in g):
                return None
            val = tuple(sorted((subj[i][0] - pd, _base_key(subj[i][1]), i) for i in g))
            key = tuple(v[:2] for v in val)
            if pb in binding:
                if binding[pb][0] != key:
                    return None
            else:
                binding[pb] = (key, [(subj[i][0] - pd, subj[i][1]) for i in g])
        else:
            if len(g) != 1 or subj_keys[g[0]] != _summand_key((pd, pb)):
                return None
    return Substitution({x: plus(*(hpow(b, d) for d, b in summ)) for x, (_, summ) in binding.items()})


def positions(t: Term, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Term]]:
    yield path, t
    if isinstance(t, H):
        yield from positions(t.arg, path + (0,))
    elif isinstance(t, (Plus, App)):
        for i, a in enumerate(t.args):
            yield from positions(a, path + (i,))


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, H):
        return H(replace_at(t.arg, rest, new))
    if isinstance(t, Plus):
        args = list(t.args)
        args[i] = replace_at(args[i], rest, new)
        return plus(*args)
    if isinstance(t, App):
        args = list(t.args)
        args[i] = replace_at(args[i], rest, new)
        return App(t.fn, tuple(args))
    raise ValueError("bad position")


def r2_steps(t: Term, bound: int = 100_000) -> Iterator[tuple[tuple[int, ...], int, Term]]:
    """Every single R2 step modulo ACh found by the brute-force matcher, as
    ``(position, rule index, result)``."""
    for path, sub in positions(t):
        for ri, (lhs, rhs) in enumerate(R2_RULES):
            sigma = ach_match_bruteforce(lhs, sub, bound)
            if sigma is not None:
                yield path, ri, replace_at(t, path, apply(rhs, sigma))


def has_r2_redex_bruteforce(t: Term, bound: int = 100_000) -> bool:
    return next(r2_steps(t, bound), None) is not None


def normalize_r2_ach_bruteforce(t: Term, bound: int = 100_000) -> Term:
    while True:
        step = next(r2_steps(t, bound), None)
        if step is None:
            return t
        t = step[2]


# ---------------------------------------------------------------------------
# randomized R1 rewriting modulo AC

def _r1_redexes(t: Term, path=()):
    if isinstance(t, Plus):
        keys = [ac_key(a) for a in t.args]
        for i in range(len(t.args)):
            if isinstance(t.args[i], Zero):
                rest = t.args[:i] + t.args[i + 1:]
                yield path, plus(*rest)
            for j in range(i + 1, len(t.args)):
                if keys[i] == keys[j]:
                    rest = [a for k, a in enumerate(t.args) if k not in (i, j)]
                    yield path, plus(*rest)
    elif isinstance(t, H):
        if isinstance(t.arg, Zero):
            yield path, ZERO
        elif isinstance(t.arg, Plus):
            yield path, ("split", t.arg.args)
    if isinstance(t, H):
        yield from _r1_redexes(t.arg, path + (0,))
    elif isinstance(t, (Plus, App)):
        for i, a in enumerate(t.args):
            yield from _r1_redexes(a, path + (i,))


def flatten_sums(t: Term) -> Term:
    """The flattened representative of the AC class of ``t``."""
    if isinstance(t, H):
        return H(flatten_sums(t.arg))
    if isinstance(t, Plus):
        return plus(*(flatten_sums(a) for a in t.args))
    if isinstance(t, App):
        return App(t.fn, tuple(flatten_sums(a) for a in t.args))
    return t


def r1_random_normalize(t: Term, rng: random.Random, max_steps: int = 10_000) -> Term:
    """Rewrite with R1 modulo AC choosing a random redex (and, for the
    distribution rule, a random split of the sum) at every step."""
    for _ in range(max_steps):
        t = flatten_sums(t)
        redexes = list(_r1_redexes(t))
        if not redexes:
            return t
        path, result = rng.choice(redexes)
        if isinstance(result, tuple):
            args = list(result[1])
            rng.shuffle(args)
            cut = rng.randint(1, len(args) - 1)
            result = plus(H(plus(*args[:cut])), H(plus(*args[cut:])))
        t = replace_at(t, path, result)
    raise RuntimeError("R1 rewriting did not terminate")


def canonical_is_irreducible(c: CanonicalTerm) -> bool:
    return is_irreducible_r2_ach(c.to_term())
