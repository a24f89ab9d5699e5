"""Asymmetric unification modulo xor with a homomorphism (ACUNh)."""
from .terms import (
    Term, Atom, Zero, H, Plus, App, ZERO, Monomial, CanonicalTerm, Substitution,
    parse_term, parse_substitution, canonicalize, mset, degree, apply, equal_mod_acunh,
)
from .problem import Problem, Equation, parse_problem
from .rewrite import is_irreducible_r2_ach, is_asymmetric_unifier, normalize_rh

__version__ = "0.1.0"
