from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from symsos.arith import (
    binom,
    falling_factorial,
    format_rational,
    from_mask,
    generalized_binom,
    num_subsets,
    parse_rational,
    subset_masks,
    subset_rank,
    subset_unrank,
    to_mask,
    to_rational,
)


def test_binom_examples():
    assert binom(5, 2) == 10
    assert binom(4, -1) == 0
    assert binom(7, 7) == 1
    assert binom(3, 5) == 0
    with pytest.raises(ValueError):
        binom(-1, 0)


def product_oracle(x: Fraction, m: int) -> Fraction:
    num = Fraction(1)
    for i in range(m):
        num *= x - i
    den = 1
    for i in range(1, m + 1):
        den *= i
    return num / den


def test_generalized_binom_examples():
    assert generalized_binom(Fraction(3, 2), 4) == Fraction(3, 128)
    assert generalized_binom(Fraction(3, 2), 4) == product_oracle(Fraction(3, 2), 4)
    assert generalized_binom(Fraction(-7, 3), 0) == 1
    assert generalized_binom(5, 2) == 10


def test_falling_factorial_examples():
    assert falling_factorial(5, 3) == 60
    assert falling_factorial(Fraction(11, 7), 0) == 1
    assert falling_factorial(Fraction(3, 2), 2) == Fraction(3, 4)


@given(st.integers(0, 12), st.integers(0, 12))
def test_generalized_binom_agrees_with_binom(n, k):
    assert generalized_binom(n, k) == binom(n, k)


def test_rational_parsing():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-5") == -5
    assert format_rational(Fraction(6, 8)) == "3/4"
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        parse_rational("0.5")
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


@given(st.fractions())
def test_format_parse_roundtrip(x):
    assert parse_rational(format_rational(x)) == x


def colex_oracle(n: int, q: int) -> list[frozenset]:
    out = []
    for size in range(q + 1):
        # colex: compare by largest element first
        out.extend(sorted((frozenset(c) for c in combinations(range(1, n + 1), size)), key=lambda s: sorted(s, reverse=True)))
    return out


def test_subset_rank_examples():
    assert subset_rank([], 3, 2) == 0
    assert subset_rank([1], 3, 2) == 1
    assert subset_rank([3], 3, 2) == 3
    assert subset_rank([1, 2], 3, 2) == 4


@pytest.mark.parametrize("n,q", [(3, 2), (4, 4), (6, 3), (7, 2)])
def test_rank_order_matches_colex_enumeration(n, q):
    expected = colex_oracle(n, q)
    assert [frozenset(from_mask(m)) for m in subset_masks(n, q)] == expected
    assert num_subsets(n, q) == len(expected)
    for r, s in enumerate(expected):
        assert subset_rank(s, n, q) == r
        assert frozenset(subset_unrank(r, n, q)) == s


def test_rank_rejects_oversized_sets():
    with pytest.raises(ValueError):
        subset_rank([1, 2, 3], 4, 2)
    with pytest.raises(ValueError):
        to_mask([5], 4)
