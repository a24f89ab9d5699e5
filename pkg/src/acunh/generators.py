"""Seeded random terms and substitutions for property checks."""
from __future__ import annotations

import random
from typing import Sequence

from .terms import Atom, H, Plus, Term, Substitution, ZERO, canonicalize, hpow, plus, size

__all__ = ["random_term", "random_ground_substitution"]


def random_term(rng: random.Random, max_size: int = 12,
                constants: Sequence[str] = ("a", "b"), variables: Sequence[str] = ("x", "y")) -> Term:
    """A raw (unnormalized) term built from ``0``, atoms, ``h`` and binary or
    ternary sums, of size at most ``max_size``."""
    leaves = [ZERO] + [Atom(c, True) for c in constants] + [Atom(v, False) for v in variables]

    def build(budget: int) -> Term:
        if budget <= 1 or rng.random() < 0.1:
            return rng.choice(leaves)
        if budget == 2 or rng.random() < 0.35:
            return H(build(budget - 1))
        k = 3 if budget >= 4 and rng.random() < 0.3 else 2
        room = budget - 1
        parts = []
        for i in range(k):
            share = max(1, room // (k - i)) if i < k - 1 else max(1, room)
            share = rng.randint(1, share)
            parts.append(build(share))
            room -= size(parts[-1])
            if room <= 0:
                break
        if len(parts) < 2:
            return parts[0]
        return Plus(tuple(parts))

    while True:
        t = build(max_size)
        if size(t) <= max_size:
            return t


def random_ground_substitution(rng: random.Random, variables: Sequence[Atom],
                               constants: Sequence[Atom], degree: int = 3,
                               density: float = 0.4) -> Substitution:
    """Each variable gets an R1-normal sum of ``h^i(k)`` with ``i <= degree``."""
    out = {}
    for x in variables:
        mons = [hpow(k, i) for k in constants for i in range(degree + 1) if rng.random() < density]
        out[x] = canonicalize(plus(*mons)).to_term() if mons else ZERO
    return Substitution(out)
