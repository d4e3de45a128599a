from __future__ import annotations

import random
from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from symsos.polynomial import PolynomialQ, count_roots_open, odd_multiplicity_part, squarefree_decomposition

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def to_sympy(p: PolynomialQ):
    x = sympy.Symbol("x")
    return sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(p.coeffs)), x), x


def test_basic_arithmetic():
    x = PolynomialQ.x()
    p = (x - PolynomialQ.constant(1)) * (x + PolynomialQ.constant(2))
    assert p.coeffs == (Fraction(-2), Fraction(1), Fraction(1))
    assert p(3) == 10
    assert p.derivative().coeffs == (1, 2)
    q, r = p.divmod(x - PolynomialQ.constant(1))
    assert q == x + PolynomialQ.constant(2) and r.is_zero()
    assert PolynomialQ().degree == -1


def test_newton_binom_matches_binomials():
    p = PolynomialQ.newton_binom(-1, 3)  # C(x-1, 3)
    for k in range(1, 9):
        assert p(k) == Fraction((k - 1) * (k - 2) * (k - 3), 6)


def test_squarefree_parts():
    x = PolynomialQ.x()
    one = PolynomialQ.constant(1)
    p = (x - one) * (x - 2 * one) ** 2 * (x + 3 * one) ** 3
    parts = squarefree_decomposition(p)
    assert parts[0] == x - one
    assert parts[1] == x - 2 * one
    assert parts[2] == x + 3 * one
    assert odd_multiplicity_part(p) == (x - one) * (x + 3 * one)


@settings(max_examples=60, deadline=None)
@given(st.lists(small_q, min_size=1, max_size=5), st.lists(small_q, min_size=0, max_size=3), small_q, small_q)
def test_sturm_count_matches_sympy(roots, extra, a, b):
    x = PolynomialQ.x()
    p = PolynomialQ.constant(1)
    for r in roots:
        p = p * (x - PolynomialQ.constant(r))
    # an extra factor without real roots (x^2 + c, c > 0) or with possibly complex ones
    if extra:
        p = p * PolynomialQ([*extra, 1])
    lo, hi = min(a, b), max(a, b)
    sp, sx = to_sympy(p)
    real = {r for r in sympy.real_roots(sp)}
    expected = sum(1 for r in real if sympy.Rational(lo.numerator, lo.denominator) < r < sympy.Rational(hi.numerator, hi.denominator))
    assert count_roots_open(p, lo, hi) == expected


def test_sturm_count_with_multiple_root_at_endpoint():
    x = PolynomialQ.x()
    p = x * x * (x - PolynomialQ.constant(1))
    assert count_roots_open(p, 0, 1) == 0
    assert count_roots_open(p, -1, 2) == 2
    assert count_roots_open(p * p, Fraction(-1, 2), 1) == 1
