import itertools
import random

from hypothesis import given, settings

from acunh.enumeration import (
    HOLD, LcrAutomaton, ProductGraph, SolutionAutomaton, VarConstAutomaton, VarVarAutomaton,
    build_side_automata, build_solution_automaton, classify_finitary, compose_layers,
    enumerate_unifiers, is_instance, layer_alphabet, layer_decompose, loseh, zero_substitutions,
    _extended_constants,
)
from acunh.generators import random_ground_substitution
from acunh.problem import parse_problem
from acunh.rewrite import is_asymmetric_unifier
from acunh.terms import Atom, Substitution, canonicalize, parse_substitution, parse_term

from strategies import ground_substitutions

x, y = Atom("x"), Atom("y")
a, b = Atom("a", True), Atom("b", True)


def _same(s, t, xs):
    return all(canonicalize(s.image(v)) == canonicalize(t.image(v)) for v in xs)


def test_loseh():
    assert loseh(parse_term("h^2(a) + h(x) + b")) == canonicalize(parse_term("h(a) + x"))
    assert not loseh(parse_term("a + x"))


def test_alphabet_size():
    letters = list(layer_alphabet(parse_problem("x = b"), [b]))
    assert {dict(l)[x] for l in letters} == {frozenset({b}), frozenset({HOLD}), frozenset({b, HOLD})}
    assert list(layer_alphabet(parse_problem("a = a"), [a])) == [()]


def test_layer_examples():
    assert layer_decompose(Substitution({x: parse_term("0")})) == (frozenset({x}), [])
    z, layers = layer_decompose(Substitution({x: parse_term("h(b) + b")}))
    assert not z and layers == [((x, frozenset({b, HOLD})),), ((x, frozenset({b})),)]
    z, layers = layer_decompose(Substitution({x: parse_term("h^2(a)")}))
    assert [dict(l)[x] for l in layers] == [frozenset({HOLD}), frozenset({HOLD}), frozenset({a})]


@given(ground_substitutions)
@settings(max_examples=300)
def test_layer_round_trip(theta):
    z, layers = layer_decompose(theta)
    assert _same(compose_layers(z, layers, [x, y]), theta, [x, y])


def test_not_finitary_automaton_states():
    auto = build_solution_automaton(parse_term("h(x) + b"), parse_term("x + y"))
    consts, _ = _extended_constants(parse_problem("h(x) + b =^ x + y"))
    states, edges = auto.states_and_edges(list(layer_alphabet(parse_problem("x = y"), consts)))
    names = {str(q) for q in states}
    assert {"h(x) + b =↓ x + y", "b =↓ y", "h(x) =↓ x + y", "0 =↓ 0"} <= names
    loops = {(str(q), str(sorted((v.name, sorted(map(str, T))) for v, T in sub)))
             for q, sub, r in edges if q == r}
    assert ("h(x) + b =↓ x + y", str([("x", ["b", "h"]), ("y", ["h"])])) in loops
    assert ("h(x) =↓ x + y", str([("x", ["h"]), ("y", ["h"])])) in loops
    dot = auto.to_dot(list(layer_alphabet(parse_problem("x = y"), consts)))
    assert "doublecircle" in dot and "b =↓ y" in dot


def test_solution_automaton_rejects_duplicates():
    auto = SolutionAutomaton(canonicalize(parse_term("a")), canonicalize(parse_term("x + y")))
    assert auto.step(auto.start, {x: frozenset({a}), y: frozenset({a})}) is None
    assert auto.accepting(SolutionAutomaton(canonicalize(x), canonicalize(x)).start)


def test_side_automata():
    lcr = LcrAutomaton([(a, x)])
    assert lcr.step(0, {x: frozenset({a})}) is None
    vc = VarConstAutomaton([(x, b)])
    assert vc.step(0, {x: frozenset({b})}) is None
    assert vc.step(0, {x: frozenset({b, HOLD})}) == 1
    vv = VarVarAutomaton(x, y)
    assert vv.step(0, {x: frozenset({a, HOLD}), y: frozenset({a, HOLD})}) == 0
    assert vv.step(0, {x: frozenset({a}), y: frozenset({b})}) == 1
    assert vv.step(0, {x: frozenset({a}), y: frozenset({a})}) is None
    p = parse_problem("x = y\nrestrict: a notin x\nneq: x != b\nneq: x != y")
    kinds = [s.kind for s in build_side_automata(p)]
    assert kinds == ["lcr", "var_const", "var_var"]


def test_zero_substitutions_keep_rhs_irreducible():
    zs = list(zero_substitutions(parse_problem("y + x =^ x + a")))
    assert frozenset({x}) not in zs and frozenset() in zs


def test_enumeration_examples():
    p = parse_problem("h(x) + b =^ x + y")
    d2 = list(enumerate_unifiers(p, depth=2))
    d3 = list(enumerate_unifiers(p, depth=3))
    want1 = parse_substitution("{x -> b, y -> h(b)}")
    want2 = parse_substitution("{x -> h(b) + b, y -> h^2(b)}")
    assert any(_same(s, want1, [x, y]) for s in d2)
    assert not any(_same(s, want2, [x, y]) for s in d2)
    assert any(_same(s, want2, [x, y]) for s in d3)


def test_asymmetry_example_excludes_zero_x():
    p = parse_problem("y + x =^ x + a")
    out = list(enumerate_unifiers(p, depth=1))
    assert out
    assert all(canonicalize(s.image(x)) for s in out)
    assert any(canonicalize(s.image(y)) == canonicalize(a) for s in out)


def test_enumeration_is_sound_with_constraints():
    p = parse_problem("x = y + a\nrestrict: b notin y\nneq: y != x\nneq: x != a")
    out = list(enumerate_unifiers(p, depth=3))
    assert out
    assert all(is_asymmetric_unifier(p, s) for s in out)


def test_classification():
    assert classify_finitary(parse_problem("h(x) + b =^ x + y")).kind == "infinite"
    c = classify_finitary(parse_problem("x =^ a"))
    assert (c.kind, c.count) == ("finite", 1)
    c = classify_finitary(parse_problem("a =^ b"))
    assert (c.kind, c.count) == ("finite", 0)


def test_product_dot():
    dot = ProductGraph(parse_problem("x =^ a")).to_dot()
    assert dot.startswith('digraph "product"') and "doublecircle" in dot


def test_is_instance():
    xs = [x, y]
    general = parse_substitution("{x -> v + a, y -> h(v)}")
    assert is_instance(parse_substitution("{x -> b + a, y -> h(b)}"), general, xs)
    assert is_instance(parse_substitution("{x -> a, y -> 0}"), general, xs)
    assert not is_instance(parse_substitution("{x -> b, y -> h(b)}"), general, xs)
    # a ground substitution is an instance only of something equal to it
    s1 = parse_substitution("{x -> b, y -> h(b)}")
    s2 = parse_substitution("{x -> h(b) + b, y -> h^2(b)}")
    assert not is_instance(s1, s2, xs) and not is_instance(s2, s1, xs)
    assert is_instance(s1, s1, xs)


def test_random_ground_round_trip():
    rng = random.Random(3)
    for _ in range(100):
        theta = random_ground_substitution(rng, [x, y], [a, b], degree=4)
        z, layers = layer_decompose(theta)
        assert _same(compose_layers(z, layers, [x, y]), theta, [x, y])
