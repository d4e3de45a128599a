from __future__ import annotations

import json
import random
from fractions import Fraction
from itertools import combinations

import pytest

from symsos.arith import binom, from_mask, subset_masks
from symsos.maxcut import gl_solution, standard_moments as gl_standard
from symsos.moment import (
    LevelVector,
    LinearConstraint,
    MomentMatrix,
    SetFunction,
    basis_to_standard,
    levels_basis_to_standard,
    levels_standard_to_basis,
    matrix_from_levels,
    matrix_from_levels_rank_one,
    matrix_from_marked_levels,
    matrix_from_setfn,
    objective,
    shift_levels,
    shift_setfn,
    standard_to_basis,
    zeta_vector,
)
from symsos.psd import certify_psd, is_psd

from conftest import rand_q


def test_zeta_vector_examples():
    assert zeta_vector([], 3, 2) == (1,) + (0,) * 6
    assert zeta_vector([1, 2, 3], 3, 3) == (1,) * 8
    # order: {}, {1}, {2}, {3}
    assert zeta_vector([1, 2], 3, 1) == (1, 1, 1, 0)


def test_level_zero_indicator_matrix():
    m = matrix_from_levels(LevelVector.indicator(5, 0), 2)
    assert m.data[0][0] == 1
    assert sum(v for row in m.data for v in row) == 1


def test_uniform_distribution_matrix():
    n, q = 4, 2
    z = LevelVector(n, tuple(Fraction(1, 2**n) for _ in range(n + 1)))
    m = matrix_from_levels(z, q)
    masks = subset_masks(n, q)
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            assert m.data[i][j] == Fraction(1, 2 ** bin(a | b).count("1"))
    assert m.data == matrix_from_levels_rank_one(z, q).data


def test_closed_form_equals_rank_one_sum(rng):
    for _ in range(10):
        n = rng.randint(2, 6)
        q = rng.randint(0, n)
        z = LevelVector(n, tuple(rand_q(rng) for _ in range(n + 1)))
        assert matrix_from_levels(z, q).data == matrix_from_levels_rank_one(z, q).data
        assert matrix_from_setfn(SetFunction.lift(z), q).data == matrix_from_levels(z, q).data


def test_indicator_setfn_is_rank_one():
    n, q = 4, 2
    w = SetFunction.indicator(n, [1, 3])
    m = matrix_from_setfn(w, q)
    zeta = zeta_vector([1, 3], n, q)
    assert m.data == tuple(tuple(Fraction(a * b) for b in zeta) for a in zeta)


def test_maxcut_levels_match_standard_form_matrix():
    n, omega, q = 5, Fraction(5, 2), 2
    z = gl_solution(n, omega).levels
    w = standard_to_basis(SetFunction.lift(LevelVector(n, tuple(gl_standard(n, omega)))), 3)
    assert matrix_from_setfn(w, q).data == matrix_from_levels(z, q).data


def random_sparse_setfn(rng: random.Random, n: int) -> SetFunction:
    entries = {}
    for _ in range(rng.randint(1, 6)):
        s = frozenset(rng.sample(range(1, n + 1), rng.randint(0, n)))
        entries[s] = rand_q(rng, -2, 2)
    return SetFunction(n, entries)


def test_standard_basis_roundtrip(rng):
    n = 6
    for _ in range(50):
        w = random_sparse_setfn(rng, n)
        assert standard_to_basis(basis_to_standard(w), n) == w


def test_basis_to_standard_of_empty_indicator():
    w = basis_to_standard(SetFunction.indicator(4, []))
    assert dict(w.items()) == {frozenset(): Fraction(1)}


def test_standard_moments_are_upward_sums(rng):
    n = 5
    w = random_sparse_setfn(rng, n)
    std = basis_to_standard(w)
    for size in range(n + 1):
        for i in combinations(range(1, n + 1), size):
            expect = sum((v for h, v in w.items() if set(i) <= h), Fraction(0))
            assert std[frozenset(i)] == expect


def test_maxcut_appendix_conversion_at_levels():
    n, omega = 5, Fraction(5, 2)
    got = levels_standard_to_basis(gl_standard(n, omega), n, 3)
    assert got == gl_solution(n, omega).levels
    assert levels_basis_to_standard(got) == tuple(gl_standard(n, omega))


def test_shift_examples():
    n = 5
    g = LinearConstraint.sum_at_least(n, 2)
    w = shift_setfn(g, SetFunction.indicator(n, [1, 2, 4]))
    assert dict(w.items()) == {frozenset({1, 2, 4}): Fraction(1)}


def test_cover_shift_exhaustive():
    n = 4
    y = LevelVector(n, (Fraction(1, 2), 0, Fraction(1, 8), Fraction(1, 16), Fraction(1, 4)))
    g = LinearConstraint.sum_at_least(n, 1, range(1, n))
    z = shift_setfn(g, SetFunction.lift(y))
    assert not z.is_symmetric()
    for size in range(n + 1):
        for i in combinations(range(1, n + 1), size):
            assert z[frozenset(i)] == (len(set(i) - {n}) - 1) * y[size]


def test_shift_levels_rejects_asymmetric_constraint():
    g = LinearConstraint.sum_at_least(4, 1, [1, 2, 3])
    with pytest.raises(ValueError):
        shift_levels(g, LevelVector.indicator(4, 0))


def test_marked_levels_builder_matches_setfn_path(rng):
    for _ in range(6):
        n = rng.randint(3, 6)
        q = rng.randint(1, min(3, n))
        marked = rng.sample(range(1, n + 1), rng.randint(1, 2))
        vals = {(k, m): rand_q(rng, -2, 2) for k in range(n + 1) for m in range(len(marked) + 1) if m <= k and k - m <= n - len(marked)}
        w = SetFunction(n, {
            frozenset(i): vals[(len(i), len(set(i) & set(marked)))]
            for size in range(n + 1) for i in combinations(range(1, n + 1), size)
        })
        assert matrix_from_marked_levels(vals, n, marked, q).data == matrix_from_setfn(w, q).data


def test_objective_examples():
    n = 5
    assert objective([7, 1, 1, 1, 1, 1], LevelVector.indicator(n, 0)) == 7
    gl = gl_solution(5, Fraction(5, 2))
    assert objective([k * (n - k) for k in range(n + 1)], gl.levels) == Fraction(25, 4)


def test_json_roundtrips():
    z = LevelVector(3, (Fraction(1, 2), Fraction(-1, 3), 0, 5))
    assert LevelVector.from_json(json.loads(json.dumps(z.to_json()))) == z
    w = SetFunction(3, {frozenset({1, 3}): Fraction(2, 7), frozenset(): Fraction(1)})
    assert SetFunction.from_json(json.loads(json.dumps(w.to_json()))) == w
    m = matrix_from_levels(z, 2)
    obj = json.loads(json.dumps(m.to_json()))
    assert obj["index"][:4] == [[], [1], [2], [3]]
    assert MomentMatrix.from_json(obj).data == m.data


def test_total_mass_matches_empty_entry(rng):
    z = LevelVector(6, tuple(rand_q(rng) for _ in range(7)))
    assert matrix_from_levels(z, 2).data[0][0] == z.total_mass()
