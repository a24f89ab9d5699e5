import itertools
import random

import pytest

from acunh.automata import find_witness, intersect
from acunh.decision import (
    CONST_DEF, HSHIFT, HSHIFT_ASYM, XOR, XOR_ASYM, StdEquation, build_diseq_dfa,
    build_equation_dfa, decide_general, decide_multi_constant, decide_single_constant,
    decode_witness, eq_dfa, const_neq_dfa, hshift_dfa, hshift_asym_dfa, var_neq_dfa, xor_dfa,
    xor_asym_dfa, generalize_witness, nonzero_dfa, standardize, unit_dfa, zero_dfa,
)
from acunh.problem import parse_problem
from acunh.rewrite import is_asymmetric_unifier
from acunh.terms import Atom, canonicalize, parse_substitution, parse_term


def _value(word, j):
    return sum(col[j] << i for i, col in enumerate(word))


def _words(n_tracks, max_len=6):
    cols = list(itertools.product((0, 1), repeat=n_tracks))
    for length in range(max_len + 1):
        yield from itertools.product(cols, repeat=length)


# semantic predicates over one constant: a value is a bitmask of h-degrees
LANGUAGES = [
    (xor_dfa("P", "Q", "R"), lambda p, q, r: p == q ^ r),
    (xor_asym_dfa("P", "Q", "R"), lambda p, q, r: p == q ^ r and q and r and not q & r),
    (hshift_dfa("X", "Y"), lambda y, x: x == y << 1),
    (hshift_asym_dfa("X", "Y"), lambda y, x: x == y << 1 and y != 0),
    (var_neq_dfa("X", "Y"), lambda x, y: x != y),
    (unit_dfa("X", 2, "a"), lambda x: x == 4),
    (zero_dfa("X"), lambda x: x == 0),
    (nonzero_dfa("X"), lambda x: x != 0),
    (eq_dfa("X", "Y"), lambda x, y: x == y),
]


@pytest.mark.parametrize("dfa, pred", LANGUAGES, ids=[d.name for d, _ in LANGUAGES])
def test_language_exhaustive(dfa, pred):
    n = len(dfa.tracks)
    for w in _words(n):
        vals = [_value(w, j) for j in range(n)]
        # a shift may push a bit past the end of the word, so compare within length
        assert dfa.accepts(w) == bool(pred(*vals)), (w, vals)


def test_const_neq_language():
    dfa = const_neq_dfa("X", "a")
    for w in _words(1):
        if not w:
            continue  # the empty word has no column to leave the start state
        assert dfa.accepts(w) == (_value(w, 0) != 1), w
    assert not dfa.accepts([])


@pytest.mark.parametrize("dfa", [d for d, _ in LANGUAGES], ids=[d.name for d, _ in LANGUAGES])
def test_trailing_zero_closure(dfa):
    zero = tuple(0 for _ in dfa.tracks)
    for w in _words(len(dfa.tracks), 4):
        assert dfa.accepts(w) == dfa.accepts(w + (zero,))


def test_sample_strings():
    assert xor_dfa("P", "Q", "R").accepts([(1, 0, 1), (1, 1, 0)])
    assert hshift_asym_dfa("X", "Y").accepts([(1, 0), (1, 1), (0, 1)])
    assert not xor_asym_dfa("P", "Q", "R").accepts([])
    assert not var_neq_dfa("X", "Y").accepts([(0, 0), (1, 1)])
    assert var_neq_dfa("X", "Y").accepts([(1, 0)])


def test_decode_witness():
    s = decode_witness([(1, 0, 1), (1, 1, 0)], ("P", "Q", "R"), "a")
    expected = parse_substitution("{P -> a + h(a), Q -> h(a), R -> a}")
    assert all(canonicalize(s.image(x)) == canonicalize(expected.image(x)) for x in expected)
    empty = decode_witness((), ("P",), "a")
    assert not canonicalize(empty.image(Atom("P")))


def test_intersection_is_conjunction():
    a = xor_asym_dfa("P", "Q", "R")
    b = const_neq_dfa("Q", "a")
    prod = intersect([a, b], order=["P", "Q", "R"])
    rng = random.Random(0)
    for _ in range(500):
        w = tuple(tuple(rng.randint(0, 1) for _ in range(3)) for _ in range(rng.randint(1, 5)))
        assert prod.accepts(w) == (a.accepts(w) and b.accepts([(c[1],) for c in w]))
    assert not prod.accepts([(1, 1, 0), (1, 0, 1)])


def test_intersect_single_is_identity():
    a = hshift_dfa("X", "Y")
    prod = intersect([a])
    for w in _words(2, 4):
        assert prod.accepts(w) == a.accepts(w)


def test_find_witness():
    assert find_witness(xor_dfa("P", "Q", "R")) == ()
    assert find_witness(intersect([zero_dfa("X"), nonzero_dfa("X")])) is None
    p = parse_problem("constants: a\nU =^ V + Y\nW = h(V)\nY =^ h(W)")
    prod = intersect([build_equation_dfa(e) for e in standardize(p).equations],
                     order=["V", "W", "Y", "U"])
    w = find_witness(prod)
    assert len(w) == 3
    s = decode_witness(w, prod.tracks, "a")
    assert canonicalize(s.image(Atom("U"))) == canonicalize(parse_term("h^2(a) + a"))


def test_standardize_examples():
    p = parse_problem("constants: b\nh(x) + b =^ x + y")
    assert [str(e) for e in standardize(p).equations] == [
        "hshift(F1, x)", "const_def(F2, b)", "xor(F3, F1, F2)", "xor_asym(F3, x, y)"]
    p = parse_problem("U =^ V + Y\nW = h(V)")
    assert [str(e) for e in standardize(p).equations] == ["xor_asym(U, V, Y)", "hshift(W, V)"]


def test_standardize_distinct_tracks():
    for e in standardize(parse_problem("x =^ y + h(y)\nz = z + z")).equations:
        ops = e.operands[:-1] if e.kind == CONST_DEF else e.operands
        assert len(set(ops)) == len(ops)


def test_disequality_routing():
    with pytest.raises(ValueError):
        build_equation_dfa(StdEquation("var_neq", ("X", "Y")))
    with pytest.raises(ValueError):
        build_diseq_dfa(StdEquation(XOR, ("P", "Q", "R")))


@pytest.mark.parametrize("text, sat", [
    ("constants: a\nU =^ V + Y\nW = h(V)\nY =^ h(W)", True),
    ("x =^ x + y", False),
    ("x = y", True),
    ("h(x) + b =^ x + y", True),
    ("a =^ b", False),
    ("X = h(X)", True),
    ("x =^ x + x", True),
    ("y + x =^ x + a", True),
    ("x =^ y\nneq: x != y", False),
    ("x =^ a + y\nrestrict: a notin x", False),
    ("x =^ h(y)\nneq: y != a", True),
])
def test_decide_general(text, sat):
    p = parse_problem(text)
    d = decide_general(p)
    assert d.sat == sat
    if sat:
        assert is_asymmetric_unifier(p, d.general)
        assert is_asymmetric_unifier(p, d.witness)


def test_single_constant_witness():
    p = parse_problem("constants: a\nU =^ V + Y\nW = h(V)\nY =^ h(W)")
    d = decide_single_constant(p)
    expected = parse_substitution("{V -> a, W -> h(a), Y -> h^2(a), U -> h^2(a) + a}", ["a"])
    assert all(canonicalize(d.witness.image(x)) == canonicalize(expected.image(x)) for x in expected)


def test_single_constant_rejects_two():
    with pytest.raises(ValueError):
        decide_single_constant(parse_problem("x = a + b"))


def test_asymmetry_needs_nonzero_x():
    p = parse_problem("y + x =^ x + a")
    d = decide_multi_constant(p, ["a", "c"])
    assert d.sat
    assert canonicalize(d.witness.image(Atom("x")))


def test_plan_records_guesses():
    d = decide_multi_constant(parse_problem("x =^ y + z"), ["a", "b"])
    assert d.sat and d.plan is not None
    assert any(g == "nonzero" for (v, _), g in d.plan.zero_guess.items() if v == "y")


def test_generalize_witness():
    p = parse_problem("x =^ h(y)")
    out = generalize_witness(parse_substitution("{x -> h(c), y -> c}"), "c", p)
    assert out and not any(canonicalize(t).constants() for t in out[0].values())
    assert all(is_asymmetric_unifier(p, s) for s in out)
    same = parse_substitution("{x -> h(a), y -> a}")
    assert generalize_witness(same, "c", p) == [same]


def test_generalize_symmetric_pair():
    p = parse_problem("x = y\ny = x")
    out = generalize_witness(parse_substitution("{x -> c, y -> c}"), "c", p)
    v = out[0].image(Atom("x"))
    assert isinstance(v, Atom) and not v.is_const and out[0].image(Atom("y")) == v


def test_free_symbols_rejected():
    with pytest.raises(ValueError):
        decide_general(parse_problem("free: f/1\nx =^ f(y)"))
