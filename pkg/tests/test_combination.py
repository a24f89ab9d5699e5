import itertools

import pytest

from acunh.combination import (
    ACUNH, FREE, Branch, PureSystem, build_constrained_acunh, decide_combined,
    enumerate_branches, purify, solve_combined, split_system, syntactic_unify,
    syntactic_unify_lcr, theory_of,
)
from acunh.problem import Equation, parse_problem
from acunh.rewrite import is_asymmetric_unifier
from acunh.terms import Atom, App, canonicalize, parse_term

x, y, a = Atom("x"), Atom("y"), Atom("a", True)


def _pure(e):
    th = {theory_of(e.lhs), theory_of(e.rhs)} - {0}
    if len(th) > 1:
        return False
    terms = [e.lhs, e.rhs]
    for t in terms:
        own = theory_of(t)
        stack = [t]
        while stack:
            s = stack.pop()
            if s is not t and theory_of(s) not in (0, own):
                return False
            stack.extend(getattr(s, "args", ()) or ([s.arg] if hasattr(s, "arg") else []))
    return True


def test_theory_of():
    assert theory_of(x) == 0
    assert theory_of(parse_term("f(x)", free={"f": 1})) == FREE
    assert theory_of(parse_term("h(x) + a")) == ACUNH


def test_purify_orientation():
    p = parse_problem("free: f/1\nconstants: a, b\nx + f(y) =^ f(a) + b")
    pp = purify(p)
    assert all(_pure(e) for e in pp.equations)
    text = [str(e) for e in pp.equations]
    assert "f(y) =^ v1" in text           # left alien: s1 =↓ v
    assert "v2 =^ f(a)" in text           # right alien: v =↓ t1
    assert "x + v1 =^ v2 + b" in text


def test_purify_splits_mixed_roots():
    pp = purify(parse_problem("free: f/1\nf(x) = h(y)"))
    assert len(pp.equations) == 2
    assert all(_pure(e) for e in pp.equations)


def test_syntactic_unify():
    f = {"f": 1, "g": 2}
    eqs = [Equation(parse_term("g(x, f(y))", free=f), parse_term("g(f(a), z)", free=f))]
    mgu = syntactic_unify(eqs)
    assert mgu.image(Atom("z")) == parse_term("f(y)", free=f)
    assert syntactic_unify([Equation(x, parse_term("f(x)", free=f))]) is None
    assert syntactic_unify([Equation(a, Atom("b", True))]) is None


def test_syntactic_unify_lcr():
    c = Atom("c", True)
    eq = Equation(x, App("f", (c,)))
    ok = PureSystem(FREE, (eq,), (x,), (c,), ())
    assert syntactic_unify_lcr(ok) is not None
    bad = PureSystem(FREE, (eq,), (x,), (c,), ((c, x),))
    assert syntactic_unify_lcr(bad) is None


def test_branches_cover_orders_and_indices():
    p = parse_problem("x = y")
    bs = list(enumerate_branches(p))
    assert any(len(b.partition) == 1 for b in bs)
    assert any(b.pins for b in bs) is False
    assert len({b.ordering for b in bs if len(b.partition) == 2}) == 2


def test_split_system_constantifies_other_index():
    p = purify(parse_problem("free: f/1\nx =^ f(y) + a"))
    b = Branch(((Atom("v1"),), (x,), (y,)), (y, Atom("v1"), x),
               ((Atom("v1"), FREE), (x, ACUNH), (y, ACUNH)))
    s1, s2 = split_system(p, b)
    assert Atom("v1", True) in s1.constants
    assert (Atom("v1", True), y) in s1.lcr          # y precedes v1
    assert (Atom("v1", True), x) not in s1.lcr      # x follows v1
    acu = build_constrained_acunh(s1, b)
    assert acu.is_pure_acunh()


@pytest.mark.parametrize("text, sat", [
    ("free: f/1\nconstants: a, b\nx + f(y) =^ f(a) + b", True),
    ("free: f/1\nf(x) =^ f(a)", True),
    ("free: f/1\nf(x) = x", False),
    ("free: f/1\nconstants: a\nf(x + a) = h(x) + f(a)", True),
    ("free: f/1\ny =^ x + f(y)", False),
    ("free: f/1\nconstants: a\nf(x) =^ a", False),
    ("free: f/1\nx =^ f(x) + f(x)", False),
    ("free: f/1, g/1\nf(x) = g(y)", False),
])
def test_decide_combined(text, sat):
    p = parse_problem(text)
    d = decide_combined(p)
    assert d.sat == sat
    if sat:
        assert is_asymmetric_unifier(p, d.witness)


def test_pure_problem_is_delegated():
    assert decide_combined(parse_problem("h(x) + b =^ x + y")).sat


def test_constraints_with_free_symbols_rejected():
    with pytest.raises(ValueError):
        decide_combined(parse_problem("free: f/1\nx = f(y)\nneq: x != y"))


def test_solve_combined_outputs_verify():
    p = parse_problem("free: f/1\nconstants: a, b\nx + f(y) =^ f(a) + b")
    out = list(itertools.islice(solve_combined(p, depth=2), 10))
    assert out and all(is_asymmetric_unifier(p, s) for s in out)
    assert any(canonicalize(s.image(x)) == canonicalize(Atom("b", True))
               and s.image(y) == a for s in out)
