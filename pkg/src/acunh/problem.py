"""Unification problems: equations, linear constant restrictions, disequalities.

File format (one item per line, ``#`` starts a comment)::

    constants: a, b          # optional; default naming convention otherwise
    free: f/1, g/2           # free function symbols with arities
    vars: x, y               # optional, inferred from the equations
    h(x) + b =^ x + y        # asymmetric equation (rhs must stay irreducible)
    x = y                    # symmetric equation
    restrict: a notin x      # linear constant restriction
    neq: x != y              # disequality (variable or constant on the right)
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable

from .terms import (
    Atom, App, H, Plus, Term, ParseError, parse_term, is_default_constant, variables as term_vars,
    constants as term_consts, free_symbols, show, Substitution, parse_substitution,
)

__all__ = ["Equation", "Problem", "parse_problem", "ProblemError", "fresh_name"]


class ProblemError(ValueError):
    """Malformed problem file."""

    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    asymmetric: bool = True

    def __str__(self) -> str:
        op = "=^" if self.asymmetric else "="
        return f"{show(self.lhs)} {op} {show(self.rhs)}"


@dataclass(frozen=True)
class Problem:
    equations: tuple[Equation, ...] = ()
    # (constant, variable): the constant must not occur in the variable's image
    lcr: tuple[tuple[Atom, Atom], ...] = ()
    # (variable, variable-or-constant)
    diseqs: tuple[tuple[Atom, Atom], ...] = ()
    declared_constants: frozenset[str] = frozenset()
    free: tuple[tuple[str, int], ...] = ()
    declared_vars: frozenset[str] = frozenset()

    def variables(self) -> list[Atom]:
        out: set[Atom] = {Atom(n, False) for n in self.declared_vars}
        for e in self.equations:
            out |= term_vars(e.lhs) | term_vars(e.rhs)
        for c, x in self.lcr:
            out.add(x)
        for x, y in self.diseqs:
            out.add(x)
            if not y.is_const:
                out.add(y)
        return sorted(out, key=lambda a: a.name)

    def constants(self) -> list[Atom]:
        out: set[Atom] = {Atom(n, True) for n in self.declared_constants}
        for e in self.equations:
            out |= term_consts(e.lhs) | term_consts(e.rhs)
        for c, x in self.lcr:
            out.add(c)
        for x, y in self.diseqs:
            if y.is_const:
                out.add(y)
        return sorted(out, key=lambda a: a.name)

    def free_symbols(self) -> dict[str, int]:
        out = dict(self.free)
        for e in self.equations:
            out.update(free_symbols(e.lhs))
            out.update(free_symbols(e.rhs))
        return out

    def is_pure_acunh(self) -> bool:
        return not self.free_symbols()

    def with_constants(self, *names: str) -> "Problem":
        return Problem(self.equations, self.lcr, self.diseqs,
                       self.declared_constants | set(names), self.free, self.declared_vars)

    def __str__(self) -> str:
        lines = [str(e) for e in self.equations]
        lines += [f"restrict: {c} notin {x}" for c, x in self.lcr]
        lines += [f"neq: {x} != {y}" for x, y in self.diseqs]
        return "\n".join(lines)

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        out = []
        if self.declared_constants:
            out.append("constants: " + ", ".join(sorted(self.declared_constants)))
        if self.free:
            out.append("free: " + ", ".join(f"{f}/{n}" for f, n in self.free))
        if self.declared_vars:
            out.append("vars: " + ", ".join(sorted(self.declared_vars)))
        out.append(str(self))
        return "\n".join(x for x in out if x) + "\n"

    def to_json(self) -> dict:
        return {
            "constants": sorted(self.declared_constants),
            "free": {f: n for f, n in self.free},
            "equations": [
                {"lhs": show(e.lhs), "rhs": show(e.rhs), "asymmetric": e.asymmetric}
                for e in self.equations
            ],
            "restrict": [[c.name, x.name] for c, x in self.lcr],
            "neq": [[x.name, y.name, y.is_const] for x, y in self.diseqs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Problem":
        consts = data.get("constants") or None
        free = dict(data.get("free", {}))
        eqs = tuple(
            Equation(parse_term(e["lhs"], consts, free or None),
                     parse_term(e["rhs"], consts, free or None), e["asymmetric"])
            for e in data["equations"]
        )
        lcr = tuple((Atom(c, True), Atom(x, False)) for c, x in data.get("restrict", []))
        neq = tuple((Atom(x, False), Atom(y, bool(k))) for x, y, k in data.get("neq", []))
        return cls(eqs, lcr, neq, frozenset(data.get("constants", [])), tuple(free.items()))


def fresh_name(prefix: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if prefix not in taken:
        return prefix
    i = 1
    while f"{prefix}{i}" in taken:
        i += 1
    return f"{prefix}{i}"


_EQ = re.compile(r"^(?P<lhs>.*?)(?P<op>=\^|=↓|=\?|=)(?P<rhs>.*)$")


def parse_problem(text: str) -> Problem:
    consts: set[str] | None = None
    free: dict[str, int] = {}
    declared_vars: set[str] = set()
    body: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if sep and key in ("constants", "consts"):
            consts = (consts or set()) | {n.strip() for n in rest.split(",") if n.strip()}
        elif sep and key == "free":
            for item in rest.split(","):
                item = item.strip()
                if not item:
                    continue
                m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)\s*/\s*(\d+)", item)
                if not m:
                    raise ProblemError(f"bad arity declaration {item!r}", lineno)
                if m.group(1) == "h":
                    raise ProblemError("'h' is reserved", lineno)
                if int(m.group(2)) == 0:
                    raise ProblemError("use 'constants:' for 0-ary symbols", lineno)
                free[m.group(1)] = int(m.group(2))
        elif sep and key in ("vars", "variables"):
            declared_vars |= {n.strip() for n in rest.split(",") if n.strip()}
        else:
            body.append((lineno, line))

    def is_const(name: str) -> bool:
        return name in consts if consts is not None else is_default_constant(name)

    def atom(name: str, lineno: int) -> Atom:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name):
            raise ProblemError(f"bad identifier {name!r}", lineno)
        return Atom(name, is_const(name))

    eqs, lcr, neq = [], [], []
    for lineno, line in body:
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        try:
            if sep and key == "restrict":
                m = re.fullmatch(r"\s*(\S+)\s+notin\s+(\S+)\s*", rest)
                if not m:
                    raise ProblemError("expected 'restrict: c notin x'", lineno)
                c, x = atom(m.group(1), lineno), atom(m.group(2), lineno)
                if not c.is_const or x.is_const:
                    raise ProblemError("restriction needs a constant and a variable", lineno)
                lcr.append((c, x))
            elif sep and key == "neq":
                m = re.fullmatch(r"\s*(\S+)\s*!=\s*(\S+)\s*", rest)
                if not m:
                    raise ProblemError("expected 'neq: x != y'", lineno)
                x, y = atom(m.group(1), lineno), atom(m.group(2), lineno)
                if x.is_const:
                    x, y = y, x
                if x.is_const:
                    raise ProblemError("disequality needs a variable", lineno)
                neq.append((x, y))
            else:
                m = _EQ.match(line)
                if not m:
                    raise ProblemError(f"cannot read {line!r}", lineno)
                asym = m.group("op") in ("=^", "=↓")
                lhs = parse_term(m.group("lhs"), consts, free or None)
                rhs = parse_term(m.group("rhs"), consts, free or None)
                eqs.append(Equation(lhs, rhs, asym))
        except ParseError as exc:
            raise ProblemError(str(exc), lineno) from exc
    if not free:
        _check_arities(eqs)
    return Problem(tuple(eqs), tuple(lcr), tuple(neq),
                   frozenset(consts or ()), tuple(free.items()), frozenset(declared_vars))


def _check_arities(eqs: list[Equation]) -> None:
    """Undeclared free symbols must be used with one arity throughout."""
    seen: dict[str, int] = {}
    stack: list[Term] = [t for e in eqs for t in (e.lhs, e.rhs)]
    while stack:
        t = stack.pop()
        if isinstance(t, App):
            if seen.setdefault(t.fn, len(t.args)) != len(t.args):
                raise ProblemError(f"{t.fn} is used with {seen[t.fn]} and {len(t.args)} arguments")
            stack.extend(t.args)
        elif isinstance(t, Plus):
            stack.extend(t.args)
        elif isinstance(t, H):
            stack.append(t.arg)


def parse_problem_substitution(p: Problem, text: str) -> Substitution:
    consts = {c.name for c in p.constants()} | set(p.declared_constants)
    if not p.declared_constants:
        consts = None
    return parse_substitution(text, consts, p.free_symbols() or None)
