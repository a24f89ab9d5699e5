"""Generated desk-scale problem suites used by the oracle comparisons."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .problem import Problem, Equation
from .terms import Atom, parse_term

__all__ = ["SuiteConfig", "TERM_POOL", "PAIR_POOL", "pure_suite", "mixed_suite"]

# Terms over variables x, y and constants a, b of degree at most 2.
TERM_POOL = (
    "0", "x", "y", "a", "b", "h(x)", "h(y)", "h(a)", "x + y", "x + a", "y + b",
    "h(x) + x", "h(x) + a", "h(y) + x", "h(h(x))", "h(x) + b", "x + y + a",
)
PAIR_POOL = ("x", "y", "a", "b", "h(x)", "x + y", "h(y) + a")

X, Y = Atom("x"), Atom("y")
A, B = Atom("a", True), Atom("b", True)


@dataclass(frozen=True)
class SuiteConfig:
    singles: bool = True
    pairs: bool = True
    constrained: bool = True
    pair_stride: int = 1       # keep every n-th pair (1 keeps all)


def _eqs(pool) -> list[Equation]:
    terms = [parse_term(t, ["a", "b"]) for t in pool]
    return [Equation(s, t, asym) for s, t in itertools.product(terms, terms)
            for asym in (True, False)]


def pure_suite(cfg: SuiteConfig = SuiteConfig()) -> Iterator[tuple[str, Problem]]:
    """Every single equation over the term pool in both modes, every pair of
    equations over a smaller pool, and the single equations again under one
    restriction and/or one disequality."""
    singles = _eqs(TERM_POOL)
    if cfg.singles:
        for i, e in enumerate(singles):
            yield f"single-{i}", Problem((e,))
    if cfg.pairs:
        small = _eqs(PAIR_POOL)
        for n, (e1, e2) in enumerate(itertools.combinations(small, 2)):
            if n % cfg.pair_stride == 0:
                yield f"pair-{n}", Problem((e1, e2))
    if cfg.constrained:
        variants = [((A, X),), ()], [(), ((X, Y),)], [(), ((X, A),)], [((A, X),), ((X, Y),)]
        for i, e in enumerate(singles):
            for j, (lcr, neq) in enumerate(variants):
                yield f"constrained-{i}-{j}", Problem((e,), tuple(lcr), tuple(neq))


MIXED_POOL = ("x", "y", "a", "f(x)", "f(a)", "h(f(x))", "f(x) + a", "x + f(y)",
              "f(h(x))", "f(x + a)", "h(x) + f(a)", "f(f(x))")


def mixed_suite() -> Iterator[tuple[str, Problem]]:
    """Single equations over one free unary symbol ``f``, both modes."""
    terms = [parse_term(t, ["a"], {"f": 1}) for t in MIXED_POOL]
    n = 0
    for s, t in itertools.product(terms, terms):
        for asym in (True, False):
            yield f"mixed-{n}", Problem((Equation(s, t, asym),), free=(("f", 1),))
            n += 1
