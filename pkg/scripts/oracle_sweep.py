"""Compare the solvers with the brute-force oracles over the generated suites.

    python3 scripts/oracle_sweep.py decide       # decision vs ground oracle
    python3 scripts/oracle_sweep.py complete     # enumeration completeness
    python3 scripts/oracle_sweep.py mixed        # combination vs mixed oracle
"""
from __future__ import annotations

import argparse
import itertools
import time
from dataclasses import dataclass

from acunh.combination import decide_combined, solve_combined
from acunh.decision import decide_general
from acunh.enumeration import InstanceChecker, _extended_constants, enumerate_unifiers
from acunh.oracle import ground_solutions, mixed_oracle_decide, oracle_decide
from acunh.rewrite import is_asymmetric_unifier
from acunh.suite import SuiteConfig, mixed_suite, pure_suite


@dataclass
class SweepConfig:
    mode: str
    oracle_degree: int = 3
    completeness_degree: int = 2
    depth: int = 3
    pair_stride: int = 1
    limit: int | None = None
    verbose: bool = False


def sweep_decide(cfg: SweepConfig):
    for name, p in pure_suite(SuiteConfig(pair_stride=cfg.pair_stride)):
        got, want = decide_general(p).sat, oracle_decide(p, cfg.oracle_degree)
        yield name, p, got == want, f"decide={got} oracle={want}"


def sweep_complete(cfg: SweepConfig):
    for name, p in pure_suite(SuiteConfig(pair_stride=cfg.pair_stride)):
        xs = p.variables()
        us = [InstanceChecker(u, xs) for u in enumerate_unifiers(p, cfg.depth)]
        c = _extended_constants(p)[1]
        bad = next((th for th in ground_solutions(p, cfg.completeness_degree, [c.name])
                    if not any(u.covers(th) for u in us)), None)
        yield name, p, bad is None, f"{len(us)} unifiers" + (f", misses {bad}" if bad else "")


def sweep_mixed(cfg: SweepConfig):
    for name, p in mixed_suite():
        got, want = decide_combined(p).sat, mixed_oracle_decide(p)
        sols = list(itertools.islice(solve_combined(p, depth=2), 20))
        ok = got == want and all(is_asymmetric_unifier(p, s) for s in sols)
        yield name, p, ok, f"decide={got} oracle={want}, {len(sols)} solutions"


SWEEPS = {"decide": sweep_decide, "complete": sweep_complete, "mixed": sweep_mixed}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mode", choices=sorted(SWEEPS))
    ap.add_argument("--pair-stride", type=int, default=1, help="keep every n-th two-equation problem")
    ap.add_argument("--limit", type=int, default=None, help="stop after this many problems")
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    cfg = SweepConfig(args.mode, depth=args.depth, pair_stride=args.pair_stride,
                      limit=args.limit, verbose=args.verbose)
    t0 = time.perf_counter()
    n = bad = 0
    for name, p, ok, info in itertools.islice(SWEEPS[cfg.mode](cfg), cfg.limit):
        n += 1
        if not ok:
            bad += 1
            print(f"FAIL {name}: {str(p)!r}: {info}")
        elif cfg.verbose:
            print(f"ok   {name}: {info}")
    print(f"{cfg.mode}: {n - bad}/{n} agree in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
