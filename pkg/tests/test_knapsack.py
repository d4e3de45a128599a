from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from symsos.arith import binom
from symsos.knapsack import (
    adjust_n,
    certify_solution,
    condition14_check,
    condition_levels,
    cover_matrix,
    cover_values,
    demand_levels,
    epsilon_max,
    epsilon_search,
    floor_log,
    gap_solution,
    lemma2_check,
    lp_plus_constraints,
    normalize_roots,
    paper_epsilon,
    real_factor,
    pair_factor,
    root_form_lhs,
    search_report,
    theorem3_solution,
    wolsey_inequalities,
)
from symsos.moment import LinearConstraint, SetFunction, matrix_from_levels, matrix_from_setfn, shift_setfn
from symsos.psd import certify_psd, is_psd, rayleigh
from symsos.symmetry import check_reduction


def test_floor_log():
    assert [floor_log(n) for n in (1, 2, 7, 8, 16, 24)] == [0, 1, 2, 3, 4, 4]
    assert [floor_log(n, "e-floor") for n in (2, 3, 7, 8, 16, 21, 148)] == [0, 1, 1, 2, 2, 3, 4]
    with pytest.raises(ValueError):
        floor_log(8, "10")


def test_adjust_n(caplog):
    assert adjust_n(17, 2) == 16
    assert "multiple" in caplog.text
    assert adjust_n(24, 3) == 24


def test_objective_formula_e_floor():
    sol = gap_solution(16, 2, Fraction(1, 100), "e-floor")
    assert sol.logpoint == 2
    assert sol.objective() == Fraction(16, 15) * Fraction(101, 100) + Fraction(2, 100)


def test_levels_and_normalization():
    sol = gap_solution(16, 2, Fraction(1, 4))
    assert sol.levels.total_mass() == 1
    assert sol.levels.support() == [0, 4, 8, 16]
    assert binom(16, 8) * sol.levels[8] == Fraction(1, 4) * 2 / 16
    zero = gap_solution(16, 2, 0)
    assert zero.levels.support() == [0, 4]


def test_level_collision_adds_weights():
    # n = 8, t = 4: grid levels 2, 4, 6, 8 and beta = 3; n = 4, t = 4 puts beta = 2 on the grid
    sol = gap_solution(4, 4, Fraction(1, 10))
    assert sol.logpoint == 2
    expected = (Fraction(11, 10) * Fraction(4, 3) / 2 + Fraction(1, 10) * 4 / (2 * 4)) / binom(4, 2)
    assert sol.levels[2] == expected


def test_epsilon_bound():
    em = epsilon_max(16, 2, 4)
    assert gap_solution(16, 2, em).levels[0] == 0
    with pytest.raises(ValueError):
        gap_solution(16, 2, em + Fraction(1, 10**6))
    with pytest.raises(ValueError):
        gap_solution(15, 2, Fraction(1, 10))


def test_cover_values_match_constraint_shift():
    n, t = 6, 2
    sol = gap_solution(n, t, Fraction(1, 3))
    covers = lp_plus_constraints(n).covers
    for e in (1, 4, 6):
        direct = matrix_from_setfn(shift_setfn(covers[e - 1], SetFunction.lift(sol.levels)), t)
        assert cover_matrix(sol, e, t).data == direct.data


def test_cover_matrix_structure():
    # sum_{n not in I} y(|I|-1) ZZ^T + sum_{n in I} y(|I|-2) ZZ^T - y_0 Z_0 Z_0^T
    n, t = 6, 2
    sol = gap_solution(n, t, Fraction(1, 5), logpoint=2)
    w = {}
    for size in range(n + 1):
        for i in combinations(range(1, n + 1), size):
            s = frozenset(i)
            y = sol.levels[size]
            if not s:
                w[s] = -y
            elif n in s:
                w[s] = y * (size - 2)
            else:
                w[s] = y * (size - 1)
    assert cover_matrix(sol, n, t).data == matrix_from_setfn(SetFunction(n, w), t).data


def test_wolsey_inequalities_reduce_to_lp_plus():
    n = 5
    rows = wolsey_inequalities([1] * n, [1] * n, Fraction(n, n - 1))
    # A = {} gives the demand row, |A| = 1 gives scaled covers, larger A are dominated
    assert len(rows) == 1 + n
    demand = rows[0]
    assert demand.coeffs == (1,) * n and demand.constant == -Fraction(n, n - 1)
    for row in rows[1:]:
        scale = Fraction(1, n - 1)
        assert sorted(row.coeffs) == [0] + [scale] * (n - 1)
        assert row.constant == -scale


def test_wolsey_general_instance():
    rows = wolsey_inequalities([3, 2, 4], [5, 2, 3], 6)
    # every integral solution meeting the demand satisfies all inequalities
    for size in range(4):
        for s in combinations(range(3), size):
            if sum([5, 2, 3][i] for i in s) >= 6:
                for g in rows:
                    assert g.evaluate([i + 1 for i in s]) >= 0


def test_lemma2_zero_epsilon_condition_fails():
    sol = gap_solution(8, 1, 0)
    rep = lemma2_check(sol, 1)
    assert rep.preconditions_ok
    assert not rep.condition_ok
    assert rep.implication_holds


def test_lemma2_implication_on_grid():
    for n, t in [(8, 2), (12, 2), (9, 3)]:
        em = epsilon_max(n, t, floor_log(n))
        for frac in (Fraction(1, 4), Fraction(3, 4), Fraction(1)):
            sol = gap_solution(n, t, em * frac)
            direct = lemma2_check(sol, method="direct", covers="one")
            reduced = lemma2_check(sol, method="reduce", covers="one")
            assert (direct.condition_ok, direct.demand_ok, direct.covers_ok) == (
                reduced.condition_ok, reduced.demand_ok, reduced.covers_ok
            )
            assert direct.implication_holds


def test_lemma2_condition_holds_at_n20_t1():
    # the smallest desk-scale instances where the sufficient condition itself holds have t = 1
    sol = gap_solution(20, 1, epsilon_max(20, 1, 4))
    rep = lemma2_check(sol, method="reduce")
    assert rep.condition_ok and rep.demand_ok and rep.covers_ok and rep.passed


def test_normalize_examples():
    assert normalize_roots([Fraction(-3)], 1, 10) == [3]
    assert normalize_roots([Fraction(2)], 3, 10) == [2, 10, 10]
    assert normalize_roots([Fraction(1, 2)], 1, 10) == [1]
    assert normalize_roots([Fraction(40)], 1, 10) == [10]
    assert normalize_roots([(Fraction(3), Fraction(4))], 2, 10) == [5, 5]
    with pytest.raises(ValueError):
        normalize_roots([1, 2, 3], 2, 10)
    with pytest.raises(ValueError):
        normalize_roots([0], 1, 10)


def test_irrational_modulus_collapse():
    roots = normalize_roots([(Fraction(1), Fraction(1))], 2, 12)
    a, b = Fraction(1), Fraction(1)
    r = roots[0]
    assert all(pair_factor(a, b, k) >= real_factor(r, k) ** 2 for k in range(1, 13))


def test_condition14_examples():
    n, t = 16, 2
    sol = gap_solution(n, t, 0)
    beta = sol.logpoint
    expected = binom(n, beta) * sol.levels[beta] * (beta - 2) * (n - beta) ** (2 * t) - Fraction(n, n - 1) * n ** (2 * t)
    assert condition14_check(sol, [n, n]) == expected
    sol = gap_solution(n, t, Fraction(1, 2))
    on_grid = condition14_check(sol, [8, 16])
    beta_term = binom(n, beta) * sol.levels[beta] * (beta - 2) * (8 - beta) ** 2 * (16 - beta) ** 2
    assert on_grid == beta_term - Fraction(n, n - 1) * 8**2 * 16**2


def test_condition14_consistent_with_certified_matrix():
    # a certified matrix covers every root choice
    rng = random.Random(5)
    n, t = 20, 1
    sol = gap_solution(n, t, epsilon_max(n, t, 4))
    assert check_reduction(condition_levels(sol), t).feasible
    for _ in range(40):
        roots = [Fraction(rng.randint(1, 4 * n), 4) for _ in range(t)]
        assert condition14_check(sol, roots) >= 0


def test_theorem3_objective():
    sol = theorem3_solution(16, 2, Fraction(1, 10), Fraction(1, 2))
    assert sol.objective() == Fraction(1, 2) * Fraction(11, 10) + Fraction(2, 10)
    assert sol.integral_optimum() == 1
    zero = theorem3_solution(16, 2, 0, Fraction(1, 2))
    assert zero.levels.support() == [0, 4]
    rep = certify_solution(zero)
    assert set(rep.constraint_ok) == {"demand"}
    with pytest.raises(ValueError):
        theorem3_solution(16, 2, 0, Fraction(3, 2))


def test_certify_solution_cross_checks_small_instances():
    sol = gap_solution(8, 2, epsilon_max(8, 2, 3))
    rep = certify_solution(sol)
    assert rep.feasible
    assert rep.methods["cover_3"] == "reduce+direct"
    assert len(rep.constraint_ok) == 9


def test_search_small_instance():
    res = epsilon_search(8, 2)
    assert res.feasible
    assert 0 < res.epsilon <= res.epsilon_max
    assert res.epsilon.denominator <= 2**64
    assert len(res.profile) == 64
    # the bracket below the reported epsilon fails
    failing = [e for e, ok in res.profile if not ok and e < res.epsilon]
    assert failing
    rep = search_report(res)
    assert rep["feasible"] and rep["objective"] and rep["sufficient_condition"]["implication_holds"]
    assert math.isfinite(rep["paper_epsilon_approx"])


def test_paper_epsilon_is_large_at_small_n():
    assert paper_epsilon(16, 2) > 1
    assert paper_epsilon(2**12, 2) < paper_epsilon(16, 2)
