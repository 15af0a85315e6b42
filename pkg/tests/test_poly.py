from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from comon import poly
from comon.errors import SolverIncomplete

F = Fraction


def from_roots(roots):
    p = [F(1)]
    for r in roots:
        p = poly.pmul(p, [-F(r), F(1)])
    return p


def test_division_and_gcd():
    p = from_roots([1, 2, 3])
    q, r = poly.pdivmod(p, from_roots([2]))
    assert r == [] and q == from_roots([1, 3])
    assert poly.pgcd(from_roots([1, 2]), from_roots([2, 5])) == from_roots([2])
    with pytest.raises(ZeroDivisionError):
        poly.pdivmod(p, [])


def test_rational_roots_with_leftover():
    p = poly.pmul(from_roots([1, -2, F(1, 3)]), [F(1), F(0), F(1)])
    roots, rest = poly.rational_roots(p)
    assert roots == [F(-2), F(1, 3), F(1)]
    assert rest == [F(1), F(0), F(1)]


@given(st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=4), min_size=1, max_size=4))
def test_rational_roots_recovers_products(roots):
    found, rest = poly.rational_roots(from_roots(roots))
    assert found == sorted(set(roots))
    assert rest == [F(1)]


def test_zero_polynomial_is_incomplete():
    with pytest.raises(SolverIncomplete):
        poly.rational_roots([])


def test_resultant_of_two_lines():
    # x - y and x + y, eliminating x: resultant is a multiple of y
    f = {(1, 0): F(1), (0, 1): F(-1)}
    g = {(1, 0): F(1), (0, 1): F(1)}
    r = poly.resultant(f, g, 0, 1)
    assert r[0] == 0 and len(r) == 2 and r[1] != 0


def test_solve_bivariate_circle_and_line():
    # x^2 + y^2 = 25 and x = y + 1  ->  (4, 3), (-3, -4)
    circle = {(2, 0): F(1), (0, 2): F(1), (0, 0): F(-25)}
    line = {(1, 0): F(1), (0, 1): F(-1), (0, 0): F(-1)}
    assert sorted(poly.solve_bivariate([circle, line])) == [(F(-3), F(-4)), (F(4), F(3))]


def test_solve_bivariate_irrational_is_incomplete():
    # x^2 = 2, y = 0
    f = {(2, 0): F(1), (0, 0): F(-2)}
    g = {(0, 1): F(1)}
    with pytest.raises(SolverIncomplete):
        poly.solve_bivariate([f, g])


def test_solve_bivariate_curve_is_incomplete():
    f = {(1, 0): F(1), (0, 1): F(-1)}
    with pytest.raises(SolverIncomplete):
        poly.solve_bivariate([f, poly.mscale(f, 2)])


def test_specialize_and_univariate():
    f = {(2, 1): F(3), (0, 0): F(1)}
    g = poly.specialize(f, {1: 2})
    assert poly.as_univariate(g, 0) == [F(1), F(0), F(6)]
    with pytest.raises(ValueError):
        poly.as_univariate(f, 0)
