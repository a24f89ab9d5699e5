"""Command-line front end.

Exit codes: 0 solvable / valid, 1 unsolvable / invalid, 2 input error,
3 exploration bound exceeded.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .combination import decide_combined, solve_combined
from .decision import standardize, build_equation_dfa, build_diseq_dfa, VAR_NEQ, CONST_NEQ
from .enumeration import (
    ExplorationBoundExceeded, ProductGraph, SolutionAutomaton, classify_finitary,
    enumerate_unifiers, layer_alphabet, _extended_constants,
)
from .problem import Problem, ProblemError, parse_problem, parse_problem_substitution
from .rewrite import is_asymmetric_unifier, is_irreducible_r2_ach, normalize_rh, r1_random_normalize
from .terms import ParseError, Substitution, canonicalize, parse_term, show

EXIT_OK, EXIT_NO, EXIT_ERROR, EXIT_BOUND = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    depth: int = 5
    bound: int = 10_000
    branch_limit: int | None = None
    output: str = "text"
    seed: int = 0

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.bound <= 0:
            raise ValueError("bound must be positive")
        if self.branch_limit is not None and self.branch_limit <= 0:
            raise ValueError("branch limit must be positive")
        if self.output not in ("text", "json", "dot"):
            raise ValueError(f"unknown format {self.output!r}")


class _Exit(Exception):
    def __init__(self, code: int, msg: str = ""):
        super().__init__(msg)
        self.code = code


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(EXIT_ERROR, f"cannot read {path}: {exc.strerror}") from exc


def _load(path: str | None) -> Problem:
    text = _read(path)
    try:
        return parse_problem(text)
    except (ProblemError, ParseError) as exc:
        raise _Exit(EXIT_ERROR, f"parse error: {exc}") from exc


def _verified(p: Problem, sigma: Substitution) -> Substitution:
    """Output gate: nothing is printed unless it checks out."""
    if not is_asymmetric_unifier(p, sigma):
        raise _Exit(EXIT_ERROR, f"internal error: {sigma} does not verify")
    return sigma


def _subst_json(sigma: Substitution) -> dict:
    return {x.name: show(t) for x, t in sorted(sigma.items(), key=lambda kv: kv[0].name)}


def _emit(cfg: RunConfig, text: str, data: dict) -> None:
    if cfg.output == "json":
        print(json.dumps(data, sort_keys=True))
    else:
        print(text)


def _pure_only(p: Problem, what: str) -> None:
    if not p.is_pure_acunh():
        raise _Exit(EXIT_ERROR, f"{what} supports problems without free symbols only")


# ---------------------------------------------------------------------------
# subcommands

def cmd_decide(p: Problem, cfg: RunConfig) -> int:
    try:
        d = decide_combined(p, branch_limit=cfg.branch_limit)
    except ValueError as exc:
        raise _Exit(EXIT_ERROR, str(exc)) from exc
    if d.sat:
        sigma = _verified(p, d.witness)
        _emit(cfg, f"SAT\n{sigma}", {"result": "sat", "witness": _subst_json(sigma)})
        return EXIT_OK
    _emit(cfg, "UNSAT", {"result": "unsat"})
    return EXIT_NO


def cmd_solve(p: Problem, cfg: RunConfig) -> int:
    if cfg.output == "dot":
        return _print_product(p, cfg)
    try:
        stream = (enumerate_unifiers(p, cfg.depth, bound=cfg.bound) if p.is_pure_acunh()
                  else solve_combined(p, cfg.depth))
        n = 0
        for sigma in stream:
            sigma = _verified(p, sigma)
            n += 1
            _emit(cfg, str(sigma), _subst_json(sigma))
            sys.stdout.flush()
    except ExplorationBoundExceeded as exc:
        raise _Exit(EXIT_BOUND, f"exploration bound exceeded: {exc}") from exc
    except ValueError as exc:
        raise _Exit(EXIT_ERROR, str(exc)) from exc
    print(f"{n} solution{'s' if n != 1 else ''}", file=sys.stderr)
    return EXIT_OK if n else EXIT_NO


def cmd_classify(p: Problem, cfg: RunConfig) -> int:
    _pure_only(p, "classify")
    if cfg.output == "dot":
        return _print_product(p, cfg)
    try:
        c = classify_finitary(p, cfg.bound)
    except ExplorationBoundExceeded:
        _emit(cfg, f"unknown(bound {cfg.bound})", {"result": "unknown", "bound": cfg.bound})
        return EXIT_BOUND
    data = {"result": c.kind, "states": c.states}
    if c.kind == "finite":
        data["count"] = c.count
    else:
        data["cycle_state"] = c.cycle_state
    _emit(cfg, str(c), data)
    return EXIT_OK


def cmd_normalize(text: str, cfg: RunConfig) -> int:
    """Each non-empty input line is a term; print its canonical form."""
    rng = random.Random(cfg.seed)
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            t = parse_term(line)
        except ParseError as exc:
            raise _Exit(EXIT_ERROR, f"parse error: {exc}") from exc
        nf = canonicalize(t)
        walked = canonicalize(r1_random_normalize(t, rng))
        if walked != nf:
            raise _Exit(EXIT_ERROR, f"internal error: normal forms of {line} differ")
        rows.append({"term": line, "normal_form": show(nf.to_term()),
                     "rh_form": show(normalize_rh(t)), "irreducible": is_irreducible_r2_ach(t)})
    for r in rows:
        flag = "irreducible" if r["irreducible"] else "reducible"
        _emit(cfg, f"{r['term']}  ->  {r['normal_form']}  [{flag}]", r)
    return EXIT_OK


def cmd_check_unifier(p: Problem, subst: str, cfg: RunConfig) -> int:
    try:
        sigma = parse_problem_substitution(p, subst)
    except ParseError as exc:
        raise _Exit(EXIT_ERROR, f"cannot read substitution: {exc}") from exc
    ok = is_asymmetric_unifier(p, sigma)
    _emit(cfg, f"{sigma}: {'valid' if ok else 'invalid'}",
          {"substitution": _subst_json(sigma), "valid": ok})
    return EXIT_OK if ok else EXIT_NO


def _print_product(p: Problem, cfg: RunConfig) -> int:
    _pure_only(p, "product export")
    try:
        sys.stdout.write(ProductGraph(p).to_dot(cfg.bound))
    except ExplorationBoundExceeded as exc:
        raise _Exit(EXIT_BOUND, f"exploration bound exceeded: {exc}") from exc
    return EXIT_OK


def export_dot(p: Problem, out: Path, bound: int = 10_000) -> list[Path]:
    """Write one DOT file per automaton built for ``p`` and return the paths."""
    _pure_only(p, "export-dot")
    files: dict[str, str] = {}
    system = standardize(p)
    for i, e in enumerate(system.equations):
        dfa = build_diseq_dfa(e) if e.kind in (VAR_NEQ, CONST_NEQ) else build_equation_dfa(e)
        files[f"std-{i:02d}-{e.kind}.dot"] = dfa.to_dot()
    consts, _ = _extended_constants(p)
    letters = list(layer_alphabet(p, consts))
    graph = ProductGraph(p)
    for i, e in enumerate(p.equations):
        lhs, rhs = canonicalize(e.lhs), canonicalize(e.rhs)
        auto = SolutionAutomaton(lhs, rhs) if e.asymmetric else SolutionAutomaton(lhs + rhs, type(rhs)())
        files[f"solution-{i:02d}.dot"] = auto.to_dot(letters, name=str(e))
    try:
        files["product.dot"] = graph.to_dot(bound)
    except ExplorationBoundExceeded:
        print(f"warning: product has more than {bound} states; product.dot skipped", file=sys.stderr)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, body in files.items():
            path = out / name
            path.write_text(body)
            paths.append(path)
    except OSError as exc:
        raise _Exit(EXIT_ERROR, f"cannot write {exc.filename}: {exc.strerror}") from exc
    return paths


def cmd_export_dot(p: Problem, out: str, cfg: RunConfig) -> int:
    if not p.equations and not p.diseqs:
        print("warning: empty problem, nothing to export", file=sys.stderr)
        return EXIT_OK
    for path in export_dot(p, Path(out), cfg.bound):
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", nargs="?", default="-", help="problem file (default: stdin)")
    common.add_argument("--depth", type=int, default=5, help="maximum string length for solve")
    common.add_argument("--bound", type=int, default=10_000, help="exploration bound (product states)")
    common.add_argument("--branch-limit", type=int, default=None,
                        help="stop the combination search after this many branches")
    common.add_argument("--format", dest="output", choices=("text", "json", "dot"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    ap = argparse.ArgumentParser(prog="acunh", description="Asymmetric unification modulo xor with a homomorphism.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("decide", parents=[common], help="decide solvability")
    sub.add_parser("solve", parents=[common], help="enumerate unifiers up to --depth")
    sub.add_parser("classify", parents=[common], help="finite or infinite set of unifiers")
    sub.add_parser("normalize", parents=[common], help="normal forms of terms, one per line")
    chk = sub.add_parser("check-unifier", parents=[common], help="verify a substitution")
    chk.add_argument("--subst", required=True, help="substitution, e.g. '{x -> a, y -> h(a)}'")
    dot = sub.add_parser("export-dot", parents=[common], help="write DOT files for every automaton")
    dot.add_argument("--out", default="dot", help="output directory")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.depth, args.bound, args.branch_limit, args.output, args.seed)
        if args.command == "normalize":
            return cmd_normalize(_read(args.file), cfg)
        p = _load(args.file)
        if args.command == "decide":
            return cmd_decide(p, cfg)
        if args.command == "solve":
            return cmd_solve(p, cfg)
        if args.command == "classify":
            return cmd_classify(p, cfg)
        if args.command == "check-unifier":
            return cmd_check_unifier(p, args.subst, cfg)
        return cmd_export_dot(p, args.out, cfg)
    except _Exit as exc:
        if str(exc):
            print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
