from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from depeq.poly import (
    MultiPoly,
    NonExactDivision,
    VariableMismatch,
    parse_poly,
    poly_arith,
    poly_eval,
    poly_exact_div,
    resultant_univariate,
)

V = ("x", "y", "z")
x, y, z = MultiPoly.gens(V)

exponents = st.tuples(*[st.integers(0, 3)] * 3)
coeffs = st.fractions(min_value=-9, max_value=9, max_denominator=5)
polys = st.dictionaries(exponents, coeffs, max_size=5).map(lambda t: MultiPoly(V, t))


def test_difference_of_squares():
    assert (x + y) * (x - y) == x * x - y * y
    assert poly_arith(x + y, x - y, "mul") == x**2 - y**2


def test_times_zero_is_empty():
    assert not (x * MultiPoly.zero(V)).terms


def test_eval_hand_value():
    assert poly_eval(x * x - y * y, {"x": 3, "y": 2, "z": 0}) == 5


def test_eval_missing_variable():
    with pytest.raises(KeyError):
        poly_eval(x + y, {"x": 1})


def test_exact_division_examples():
    assert poly_exact_div(x * x - y * y, x - y) == x + y
    with pytest.raises(NonExactDivision):
        poly_exact_div(x * x + y, x - y)


def test_variable_mismatch():
    with pytest.raises(VariableMismatch):
        poly_arith(x, MultiPoly.var("x", ("x", "w")), "add")


def test_resultants_small():
    X = MultiPoly.gens(("x",))[0]
    # Sylvester convention, p on top: Res(x - 1, x - 2) = (-2) - (-1)
    assert resultant_univariate(X - 1, X - 2, "x").constant_value() == -1
    assert not resultant_univariate(X * X - 1, X - 1, "x").terms


def test_no_zero_coefficients_stored():
    p = MultiPoly(V, {(1, 0, 0): 2, (0, 1, 0): 0})
    assert all(c != 0 for c in p.terms.values())
    assert (x - x).is_zero()


def test_parse_round_trip():
    p = parse_poly("9*x^2*y - 2*x*y^2 + 3/4*z - 5", V)
    assert parse_poly(p.to_str(), V) == p


@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + q == q + p and p * q == q * p


@given(polys, polys)
def test_exact_division_inverts_product(p, q):
    if q.is_zero():
        return
    assert poly_exact_div(p * q, q) == p


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=3), st.lists(st.integers(-5, 5), min_size=1, max_size=3),
       st.integers(-4, 4))
def test_resultant_detects_common_root(roots_p, roots_q, c):
    # p = prod (x - r), q = prod (x - s) shifted by the parameter t: resultant in t vanishes iff a root is shared
    X, T = MultiPoly.gens(("x", "t"))
    p = MultiPoly.constant(1, ("x", "t"))
    for r in roots_p:
        p = p * (X - r)
    q = MultiPoly.constant(1, ("x", "t"))
    for s in roots_q:
        q = q * (X - s - T)
    res = resultant_univariate(p, q, "x")
    shares = any(r == s + c for r in roots_p for s in roots_q)
    assert (res.eval({"t": c}) == 0) == shares
