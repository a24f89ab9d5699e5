"""Terms over {0, +, h} plus free symbols, and their ACUNh-canonical form.

A raw :class:`Term` is a syntax tree.  :func:`canonicalize` maps it to a
:class:`CanonicalTerm`, the R1,AC normal form: a duplicate-free set of
h-monomials ``h^i(base)``.  The empty set is ``0``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Term", "Zero", "Atom", "H", "Plus", "App", "ZERO",
    "var", "const", "h", "plus", "hpow",
    "Monomial", "CanonicalTerm", "canonicalize", "mset", "degree",
    "Substitution", "apply", "equal_mod_acunh",
    "parse_term", "parse_substitution", "ParseError", "is_default_constant",
    "variables", "constants", "free_symbols", "size",
]


class Term:
    """Base class of raw syntax trees."""

    __slots__ = ()

    def __add__(self, other: "Term") -> "Term":
        return plus(self, other)

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Zero(Term):
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True, slots=True)
class Atom(Term):
    """A variable or a constant; the kind tag lets constants and variables
    share one namespace (the combination procedure retags variables)."""

    name: str
    is_const: bool = False

    def __str__(self) -> str:
        return self.name

    def retag(self, is_const: bool) -> "Atom":
        return Atom(self.name, is_const)


@dataclass(frozen=True, slots=True)
class H(Term):
    arg: Term

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Plus(Term):
    args: tuple[Term, ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("Plus needs at least two arguments")

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class App(Term):
    """Application of an uninterpreted (free) function symbol."""

    fn: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return show(self)


ZERO = Zero()


def var(name: str) -> Atom:
    return Atom(name, False)


def const(name: str) -> Atom:
    return Atom(name, True)


def h(t: Term) -> Term:
    return H(t)


def hpow(t: Term, n: int) -> Term:
    for _ in range(n):
        t = H(t)
    return t


def plus(*ts: Term) -> Term:
    """Flattening sum constructor; ``plus()`` is 0, ``plus(t)`` is ``t``."""
    flat: list[Term] = []
    for t in ts:
        if isinstance(t, Plus):
            flat.extend(t.args)
        else:
            flat.append(t)
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Plus(tuple(flat))


# ---------------------------------------------------------------------------
# printing

def _sum_key(t: Term):
    # descending h-depth, then name: prints "h^2(a) + h(b) + a"
    d = 0
    while isinstance(t, H):
        d += 1
        t = t.arg
    return (-d, show(t))


def show(t: Term) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, H):
        n = 0
        while isinstance(t, H):
            n += 1
            t = t.arg
        inner = show(t)
        return f"h({inner})" if n == 1 else f"h^{n}({inner})"
    if isinstance(t, Plus):
        return " + ".join(show(a) for a in t.args)
    if isinstance(t, App):
        return f"{t.fn}({', '.join(show(a) for a in t.args)})"
    raise TypeError(t)


# ---------------------------------------------------------------------------
# canonical form

@dataclass(frozen=True, slots=True, order=True)
class Monomial:
    """``h^degree(base)``; base is an :class:`Atom` or an :class:`App` whose
    arguments are themselves in canonical printed form."""

    degree: int
    base: Term

    def sort_key(self):
        b = self.base
        tag = 0 if isinstance(b, Atom) else 1
        return (-self.degree, tag, show(b))

    def shift(self, k: int) -> "Monomial":
        return Monomial(self.degree + k, self.base)

    def to_term(self) -> Term:
        return hpow(self.base, self.degree)

    def __str__(self) -> str:
        return show(self.to_term())


class CanonicalTerm:
    """Duplicate-free set of monomials; the empty set is 0."""

    __slots__ = ("monomials", "_hash")

    def __init__(self, monomials: Iterable[Monomial] = ()):
        self.monomials = frozenset(monomials)
        self._hash = hash(self.monomials)

    @classmethod
    def xor(cls, parts: Iterable[Iterable[Monomial]]) -> "CanonicalTerm":
        acc: set[Monomial] = set()
        for p in parts:
            for m in p:
                if m in acc:
                    acc.remove(m)
                else:
                    acc.add(m)
        return cls(acc)

    def __eq__(self, other):
        return isinstance(other, CanonicalTerm) and self.monomials == other.monomials

    def __hash__(self):
        return self._hash

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.monomials)

    def __bool__(self) -> bool:
        return bool(self.monomials)

    def __contains__(self, m) -> bool:
        return m in self.monomials

    def __add__(self, other: "CanonicalTerm") -> "CanonicalTerm":
        return CanonicalTerm(self.monomials ^ other.monomials)

    def sorted(self) -> list[Monomial]:
        return sorted(self.monomials, key=Monomial.sort_key)

    def shift(self, k: int = 1) -> "CanonicalTerm":
        return CanonicalTerm(m.shift(k) for m in self.monomials)

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.monomials), default=-1)

    def atoms(self) -> set[Atom]:
        out: set[Atom] = set()
        for m in self.monomials:
            out |= _atoms_of(m.base)
        return out

    def variables(self) -> set[Atom]:
        return {a for a in self.atoms() if not a.is_const}

    def constants(self) -> set[Atom]:
        return {a for a in self.atoms() if a.is_const}

    def to_term(self) -> Term:
        return plus(*(m.to_term() for m in self.sorted()))

    def __str__(self) -> str:
        return show(self.to_term())

    def __repr__(self) -> str:
        return f"CanonicalTerm({self})"


def _atoms_of(t: Term) -> set[Atom]:
    if isinstance(t, Atom):
        return {t}
    if isinstance(t, Zero):
        return set()
    if isinstance(t, H):
        return _atoms_of(t.arg)
    out: set[Atom] = set()
    for a in t.args:  # Plus / App
        out |= _atoms_of(a)
    return out


def canonicalize(t: Term) -> CanonicalTerm:
    """R1,AC normal form of ``t`` (h distributed, 0 dropped, pairs cancelled)."""
    return CanonicalTerm(_canon(t, 0))


def _canon(t: Term, shift: int) -> set[Monomial]:
    if isinstance(t, Zero):
        return set()
    if isinstance(t, Atom):
        return {Monomial(shift, t)}
    if isinstance(t, H):
        return _canon(t.arg, shift + 1)
    if isinstance(t, Plus):
        acc: set[Monomial] = set()
        for a in t.args:
            acc ^= _canon(a, shift)
        return acc
    if isinstance(t, App):
        args = tuple(canonicalize(a).to_term() for a in t.args)
        return {Monomial(shift, App(t.fn, args))}
    raise TypeError(t)


def mset(t: Term) -> dict[Monomial, int]:
    """Multiset of summands of the Rh-normal form (no cancellation).

    Zero summands carry no monomial and are left out, so ``mset(0)`` is empty.
    Returned as a ``{monomial: multiplicity}`` dict (a Counter).
    """
    from collections import Counter

    out: Counter = Counter()
    _mset(t, 0, out)
    return out


def _mset(t: Term, shift: int, out) -> None:
    if isinstance(t, Zero):
        return
    if isinstance(t, Atom):
        out[Monomial(shift, t)] += 1
    elif isinstance(t, H):
        _mset(t.arg, shift + 1, out)
    elif isinstance(t, Plus):
        for a in t.args:
            _mset(a, shift, out)
    elif isinstance(t, App):
        args = tuple(canonicalize(a).to_term() for a in t.args)
        out[Monomial(shift, App(t.fn, args))] += 1
    else:
        raise TypeError(t)


def degree(t: Term) -> int:
    """Maximum monomial degree of the canonical form; -1 for 0."""
    return canonicalize(t).degree


def equal_mod_acunh(s: Term, t: Term) -> bool:
    return canonicalize(s) == canonicalize(t)


def variables(t: Term) -> set[Atom]:
    return {a for a in _atoms_of(t) if not a.is_const}


def constants(t: Term) -> set[Atom]:
    return {a for a in _atoms_of(t) if a.is_const}


def free_symbols(t: Term) -> dict[str, int]:
    out: dict[str, int] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            out[u.fn] = len(u.args)
            stack.extend(u.args)
        elif isinstance(u, Plus):
            stack.extend(u.args)
        elif isinstance(u, H):
            stack.append(u.arg)
    return out


def size(t: Term) -> int:
    if isinstance(t, (Zero, Atom)):
        return 1
    if isinstance(t, H):
        return 1 + size(t.arg)
    return 1 + sum(size(a) for a in t.args)


# ---------------------------------------------------------------------------
# substitutions

class Substitution(Mapping[Atom, Term]):
    """Finite map variable -> term.  Identity bindings are dropped."""

    __slots__ = ("_b",)

    def __init__(self, bindings: Mapping[Atom, Term] | Iterable[tuple[Atom, Term]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        b: dict[Atom, Term] = {}
        for x, t in items:
            if x.is_const:
                raise ValueError(f"cannot bind constant {x}")
            if t != x:
                b[x] = t
        self._b = b

    def __getitem__(self, x: Atom) -> Term:
        return self._b[x]

    def __iter__(self):
        return iter(sorted(self._b, key=lambda a: a.name))

    def __len__(self) -> int:
        return len(self._b)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._b == other._b
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._b.items()))

    def image(self, x: Atom) -> Term:
        return self._b.get(x, x)

    def compose(self, other: "Substitution") -> "Substitution":
        """``self`` then ``other``: x(self∘other) = (x self) other."""
        out = {x: apply(t, other) for x, t in self._b.items()}
        for x, t in other._b.items():
            out.setdefault(x, t)
        return Substitution(out)

    def restrict(self, xs: Iterable[Atom]) -> "Substitution":
        keep = set(xs)
        return Substitution({x: t for x, t in self._b.items() if x in keep})

    def normalized(self) -> "Substitution":
        """Images replaced by their printed canonical forms."""
        return Substitution({x: canonicalize(t).to_term() for x, t in self._b.items()})

    def canonical_images(self, xs: Iterable[Atom]) -> tuple[CanonicalTerm, ...]:
        return tuple(canonicalize(self.image(x)) for x in xs)

    def __str__(self) -> str:
        inner = ", ".join(f"{x} -> {canonicalize(self._b[x])}" for x in self)
        return "{" + inner + "}"

    def __repr__(self) -> str:
        return f"Substitution({self})"


def apply(t: Term, s: Mapping[Atom, Term]) -> Term:
    if isinstance(t, Atom):
        if t.is_const:
            return t
        return s.get(t, t) if not isinstance(s, Substitution) else s.image(t)
    if isinstance(t, Zero):
        return t
    if isinstance(t, H):
        return H(apply(t.arg, s))
    if isinstance(t, Plus):
        return Plus(tuple(apply(a, s) for a in t.args))
    if isinstance(t, App):
        return App(t.fn, tuple(apply(a, s) for a in t.args))
    raise TypeError(t)


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>->|↦|[()+,^{}]))")
_DEFAULT_CONST = re.compile(r"^[a-e]\d*$")


def is_default_constant(name: str) -> bool:
    """Naming convention used when no constant list is given: ``a``..``e``
    optionally followed by digits."""
    return bool(_DEFAULT_CONST.match(name))


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            j = pos
            while j < n and text[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {text[j]!r}", j)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text, constants, free):
        self.toks = _tokenize(text)
        self.i = 0
        self.constants = constants
        self.free = free

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, pos = self.next()
        if v != value:
            raise ParseError(f"expected {value!r}, got {v or 'end of input'!r}", pos)

    def term(self) -> Term:
        parts = [self.summand()]
        while self.peek()[1] == "+":
            self.next()
            parts.append(self.summand())
        return plus(*parts) if len(parts) > 1 else parts[0]

    def summand(self) -> Term:
        kind, v, pos = self.next()
        if kind == "num":
            if v != "0":
                raise ParseError(f"unexpected number {v}", pos)
            return ZERO
        if v == "(":
            t = self.term()
            self.expect(")")
            return t
        if kind != "ident":
            raise ParseError(f"unexpected {v or 'end of input'!r}", pos)
        if v == "h" and self.peek()[1] in ("(", "^"):
            n = 1
            if self.peek()[1] == "^":
                self.next()
                k, num, p = self.next()
                if k != "num":
                    raise ParseError("expected exponent", p)
                n = int(num)
            self.expect("(")
            t = self.term()
            self.expect(")")
            return hpow(t, n)
        if self.peek()[1] == "(":
            self.next()
            args = [self.term()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            if self.free is not None:
                if v not in self.free:
                    raise ParseError(f"undeclared function symbol {v!r}", pos)
                if self.free[v] != len(args):
                    raise ParseError(f"{v} expects {self.free[v]} arguments, got {len(args)}", pos)
            return App(v, tuple(args))
        if v == "h":
            raise ParseError("'h' is reserved for the homomorphism", pos)
        if self.constants is None:
            return Atom(v, is_default_constant(v))
        return Atom(v, v in self.constants)


def parse_term(text: str, constants: Iterable[str] | None = None,
               free: Mapping[str, int] | None = None) -> Term:
    """Parse ``term := '0' | ident | h(term) | h^n(term) | f(term, ...) | term + term``.

    ``constants`` lists the identifiers that denote constants; when omitted the
    :func:`is_default_constant` convention applies.
    """
    p = _Parser(text, None if constants is None else set(constants), free)
    t = p.term()
    kind, v, pos = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {v!r}", pos)
    return t


def parse_substitution(text: str, constants: Iterable[str] | None = None,
                       free: Mapping[str, int] | None = None) -> Substitution:
    """Parse ``{x -> t, y -> u}`` (``↦`` also accepted, braces optional)."""
    s = text.strip()
    if s.startswith("{"):
        if not s.endswith("}"):
            raise ParseError("unbalanced braces", len(text))
        s = s[1:-1]
    if not s.strip():
        return Substitution()
    bindings = {}
    depth = 0
    chunk_start = 0
    chunks = []
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            chunks.append(s[chunk_start:i])
            chunk_start = i + 1
    chunks.append(s[chunk_start:])
    for chunk in chunks:
        m = re.match(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*(?:->|↦|:=)\s*(.*)$", chunk, re.S)
        if not m:
            raise ParseError(f"malformed binding {chunk.strip()!r}", 0)
        x = Atom(m.group(1), False)
        bindings[x] = parse_term(m.group(2), constants, free)
    return Substitution(bindings)
