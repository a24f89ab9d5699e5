import random

import pytest
from hypothesis import given, settings

from acunh.problem import parse_problem
from acunh.rewrite import (
    BoundExceeded, ac_key, ach_match_bruteforce, flatten_sums, has_r2_redex_bruteforce,
    is_asymmetric_unifier, is_irreducible_r2_ach, normalize_r2_ach_bruteforce, normalize_rh,
    r1_random_normalize, r2_steps, termination_weight,
)
from acunh.terms import Atom, apply, canonicalize, parse_substitution, parse_term

from strategies import terms


@pytest.mark.parametrize("text, irreducible", [
    ("x + y", True),
    ("x + x", False),
    ("x + 0", False),
    ("h(0)", False),
    ("0", True),
    ("h(x + y) + h(x)", False),       # h(x) twice after distributing
    ("h(x + a) + x", True),
    ("h(h(0) + a)", False),
    ("f(x + x)", False),
    ("f(x) + f(x + 0)", False),
    ("f(x) + f(y)", True),
])
def test_irreducibility_examples(text, irreducible):
    t = parse_term(text, free={"f": 1})
    assert is_irreducible_r2_ach(t) == irreducible


@given(terms)
@settings(max_examples=300)
def test_irreducibility_matches_redex_search(t):
    assert is_irreducible_r2_ach(t) != has_r2_redex_bruteforce(t)


@given(terms)
@settings(max_examples=300)
def test_weight_decreases_on_steps(t):
    w = termination_weight(t)
    for _, _, r in r2_steps(t):
        assert termination_weight(r) < w


@given(terms)
@settings(max_examples=200)
def test_r2_normal_form_agrees_with_canonical_form(t):
    nf = normalize_r2_ach_bruteforce(normalize_rh(t))
    assert canonicalize(nf) == canonicalize(t)
    assert is_irreducible_r2_ach(nf)


@given(terms)
@settings(max_examples=200)
def test_random_r1_strategies_agree(t):
    keys = {ac_key(r1_random_normalize(t, random.Random(seed))) for seed in range(4)}
    assert len(keys) == 1


def test_flatten_sums():
    t = parse_term("(a + (b + x)) + h((x + y) + a)")
    flat = flatten_sums(t)
    assert len(flat.args) == 4
    assert ac_key(flat) == ac_key(t)


def test_ach_match_binds_variables():
    sigma = ach_match_bruteforce(parse_term("x + y + x"), parse_term("h(a) + b + h(a)"))
    assert sigma is not None
    assert canonicalize(sigma.image(Atom("y"))) == canonicalize(parse_term("b"))


def test_ach_match_respects_bound():
    with pytest.raises(BoundExceeded):
        ach_match_bruteforce(parse_term("x + y + x"), parse_term("a + b + c + d + e"), bound=10)


def test_ach_match_under_h():
    # h(x) + h(x) matches h(a + b) + h(a + b) only as a whole summand group
    sigma = ach_match_bruteforce(parse_term("x + x"), parse_term("h(a + b) + h(a) + h(b)"))
    assert sigma is not None


def test_unifier_check_asymmetry():
    p = parse_problem("constants: a\ny + x =^ x + a")
    assert is_asymmetric_unifier(p, parse_substitution("{y -> a}", ["a"]))
    assert not is_asymmetric_unifier(p, parse_substitution("{x -> 0, y -> a}", ["a"]))


def test_unifier_check_constraints():
    p = parse_problem("x =^ y\nrestrict: a notin x\nneq: x != b")
    assert is_asymmetric_unifier(p, parse_substitution("{x -> h(b), y -> h(b)}"))
    assert not is_asymmetric_unifier(p, parse_substitution("{x -> a, y -> a}"))
    assert not is_asymmetric_unifier(p, parse_substitution("{x -> b, y -> b}"))


def test_rhs_is_normalized_before_instantiation():
    # x + x normalizes to 0, so its instance stays irreducible
    p = parse_problem("0 =^ x + x")
    assert is_asymmetric_unifier(p, parse_substitution("{x -> a}"))
    assert apply(parse_term("x + x"), parse_substitution("{x -> a}")) is not None
