from __future__ import annotations

from fractions import Fraction

import pytest

from symsos.arith import binom, generalized_binom
from symsos.maxcut import (
    MaxCutInstance,
    certify_feasibility,
    gl_setfn_from_standard,
    gl_solution,
    gl_solution_from_standard,
    lemma1_check,
)
from symsos.moment import SetFunction
from symsos.polynomial import PolynomialQ

from conftest import rand_q


def test_n3_levels():
    w = Fraction(3, 2)
    sol = gl_solution(3, w)
    assert generalized_binom(w, 4) == Fraction(3, 128)
    assert sol.levels.values == tuple(4 * Fraction(3, 128) * (-1) ** (3 - k) / (w - k) for k in range(4))
    assert sol.levels == gl_solution_from_standard(3, w)
    assert sol.levels.total_mass() == 1


@pytest.mark.parametrize("n", [3, 5, 7])
def test_setfn_conversion_matches_levels(n):
    w = Fraction(n, 2)
    assert gl_setfn_from_standard(n, w) == SetFunction.lift(gl_solution(n, w).levels)


def test_rejects_integral_omega_and_range():
    with pytest.raises(ValueError):
        gl_solution(4, 2)
    with pytest.raises(ValueError):
        MaxCutInstance(5, Fraction(7, 2))


def test_lemma1_examples(rng):
    sol = gl_solution(5, Fraction(5, 2))
    assert lemma1_check(sol, PolynomialQ.constant(1))[1] == 1
    cut = PolynomialQ([0, 5, -1])
    assert lemma1_check(sol, cut)[1:] == (Fraction(25, 4), Fraction(25, 4))
    sol7 = gl_solution(7, Fraction(7, 2))
    for _ in range(30):
        p = PolynomialQ([rand_q(rng, -3, 3) for _ in range(rng.randint(1, 8))])
        ok, lhs, rhs = lemma1_check(sol7, p)
        assert ok and lhs == p(Fraction(7, 2))
    with pytest.raises(ValueError):
        lemma1_check(sol, PolynomialQ([0] * 6 + [1]))


def test_lemma1_at_non_half_omega():
    sol = gl_solution(6, Fraction(7, 3))
    for d in range(7):
        assert lemma1_check(sol, PolynomialQ.x() ** d)[0]


def test_feasibility_n5():
    rep = certify_feasibility(5, Fraction(5, 2), 2)
    assert rep.feasible and rep.reduce_feasible and rep.direct_feasible
    assert rep.objective == Fraction(25, 4)
    assert rep.integral_opt == 6
    assert rep.gap == Fraction(25, 24)
    assert rep.kernel_dim == 6
    js = rep.to_json()
    assert js["gap"] == "25/24" and js["gap_approx"] == pytest.approx(25 / 24)


def test_feasibility_n7_t3():
    assert certify_feasibility(7, Fraction(7, 2), 3).feasible


def test_one_round_above_floor_omega():
    # measured rather than proved: both paths reject t = floor(omega) + 1
    rep = certify_feasibility(5, Fraction(5, 2), 3)
    assert rep.reduce_feasible is False and rep.direct_feasible is False


@pytest.mark.parametrize("n,omega,last", [(6, Fraction(3, 2), 2), (8, Fraction(5, 2), 3), (8, Fraction(7, 2), 4), (7, Fraction(5, 3), 2)])
def test_measured_last_round_below_half(n, omega, last):
    # measured: for omega < n/2 the solution survives up to ceil(omega), one round past floor(omega)
    assert certify_feasibility(n, omega, last, "reduce").feasible
    assert not certify_feasibility(n, omega, last + 1, "reduce").feasible
