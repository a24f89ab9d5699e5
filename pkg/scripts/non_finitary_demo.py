"""Show that h(x) + b =^ x + y has infinitely many incomparable unifiers.

Prints the classification of the product automaton, the first unifiers in
breadth-first order, and checks that none is an instance of another.
"""
from __future__ import annotations

import argparse
import itertools
from dataclasses import dataclass

from acunh.enumeration import classify_finitary, enumerate_unifiers, is_instance
from acunh.problem import parse_problem


@dataclass
class DemoConfig:
    problem: str = "constants: b\nh(x) + b =^ x + y"
    count: int = 5
    depth: int = 8


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=DemoConfig.count)
    ap.add_argument("--depth", type=int, default=DemoConfig.depth)
    args = ap.parse_args()
    cfg = DemoConfig(count=args.count, depth=args.depth)
    p = parse_problem(cfg.problem)
    print(p)
    print("classification:", classify_finitary(p))
    sols = list(itertools.islice(enumerate_unifiers(p, cfg.depth), cfg.count))
    for s in sols:
        print(" ", s)
    xs = p.variables()
    clashes = [(s, t) for s, t in itertools.permutations(sols, 2) if is_instance(s, t, xs)]
    print("pairwise incomparable:", not clashes)


if __name__ == "__main__":
    main()
