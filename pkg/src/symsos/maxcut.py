"""Max-Cut on the complete graph K_n: the symmetric pseudo-distribution with ``omega`` vertices on one side."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .arith import RationalLike, binom, format_rational, generalized_binom, to_rational
from .moment import LevelVector, SetFunction, levels_standard_to_basis, matrix_from_levels, objective, standard_to_basis
from .polynomial import PolynomialQ
from .psd import PsdCertificate, Verdict, certify_psd, is_psd
from .symmetry import check_reduction


@dataclass(frozen=True)
class MaxCutInstance:
    n: int
    omega: Fraction

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("K_n needs n >= 2")
        object.__setattr__(self, "omega", to_rational(self.omega))
        if not 0 <= self.omega <= Fraction(self.n, 2):
            raise ValueError(f"omega must lie in [0, n/2], got {self.omega}")

    def cut_levels(self) -> tuple[int, ...]:
        """Number of cut edges when the ``k`` chosen vertices form one side."""
        return tuple(k * (self.n - k) for k in range(self.n + 1))

    @property
    def integral_optimum(self) -> int:
        return (self.n // 2) * ((self.n + 1) // 2)


@dataclass(frozen=True)
class GLSolution:
    instance: MaxCutInstance
    levels: LevelVector


def gl_solution(n: int, omega: RationalLike) -> GLSolution:
    """``y_k = (n+1) binom(omega, n+1) (-1)^(n-k) / (omega - k)`` for every ``k = 0..n``."""
    inst = MaxCutInstance(n, to_rational(omega))
    w = inst.omega
    if w.denominator == 1:
        raise ValueError(f"omega = {w} is an integer: the weight (omega - k) vanishes at k = omega")
    scale = (n + 1) * generalized_binom(w, n + 1)
    levels = LevelVector(n, tuple(scale * (-1) ** (n - k) / (w - k) for k in range(n + 1)))
    if levels.total_mass() != 1:
        raise AssertionError("pseudo-distribution does not sum to 1")
    return GLSolution(inst, levels)


def standard_moments(n: int, omega: RationalLike) -> list[Fraction]:
    """``y_I = binom(omega, |I|) / binom(n, |I|)`` indexed by ``|I|``."""
    w = to_rational(omega)
    return [generalized_binom(w, k) / binom(n, k) for k in range(n + 1)]


def gl_solution_from_standard(n: int, omega: RationalLike) -> LevelVector:
    """The same levels obtained by inverting the change of basis on the standard moments."""
    return levels_standard_to_basis(standard_moments(n, omega), n, (n + 1) // 2)


def gl_setfn_from_standard(n: int, omega: RationalLike) -> SetFunction:
    """Set-function version of :func:`gl_solution_from_standard` (enumerates all ``2^n`` subsets)."""
    y = SetFunction.lift(LevelVector(n, tuple(standard_moments(n, omega))))
    return standard_to_basis(y, (n + 1) // 2)


def lemma1_check(solution: GLSolution, p: PolynomialQ) -> tuple[bool, Fraction, Fraction]:
    """``sum_k C(n,k) y_k P(k) == P(omega)`` for ``deg P <= n``; returns (holds, lhs, rhs)."""
    n = solution.instance.n
    if p.degree > n:
        raise ValueError(f"polynomial degree {p.degree} exceeds n = {n}")
    lhs = objective([p(k) for k in range(n + 1)], solution.levels)
    rhs = p(solution.instance.omega)
    return lhs == rhs, lhs, rhs


@dataclass
class MaxCutReport:
    n: int
    omega: Fraction
    t: int
    mode: str
    feasible: bool
    objective: Fraction
    integral_opt: int
    kernel_dim: int | None
    reduce_feasible: bool | None
    direct_feasible: bool | None
    runtime_ms: float
    direct_result: Verdict | None = None

    @property
    def gap(self) -> Fraction:
        return self.objective / self.integral_opt

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "omega": format_rational(self.omega),
            "t": self.t,
            "mode": self.mode,
            "feasible": self.feasible,
            "reduce_feasible": self.reduce_feasible,
            "direct_feasible": self.direct_feasible,
            "objective": format_rational(self.objective),
            "objective_approx": float(self.objective),
            "integral_opt": self.integral_opt,
            "gap": format_rational(self.gap),
            "gap_approx": float(self.gap),
            "kernel_dim": self.kernel_dim,
            "runtime_ms": round(self.runtime_ms, 3),
        }
        return out


def certify_feasibility(n: int, omega: RationalLike, t: int, mode: str = "both") -> MaxCutReport:
    """Certify the degree-``t`` moment matrix of the solution (unconstrained problem: only sum and PSD)."""
    if mode not in ("reduce", "direct", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    start = time.perf_counter()
    sol = gl_solution(n, omega)
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}")
    red_ok = direct_ok = None
    kernel = None
    direct = None
    if mode in ("reduce", "both"):
        red_ok = check_reduction(sol.levels, t).feasible
    if mode in ("direct", "both"):
        direct = certify_psd(matrix_from_levels(sol.levels, t))
        direct_ok = is_psd(direct)
        if isinstance(direct, PsdCertificate):
            kernel = direct.zero_pivots
    if red_ok is not None and direct_ok is not None and red_ok != direct_ok:
        raise AssertionError(f"reduction ({red_ok}) and direct ({direct_ok}) verdicts disagree at n={n}, t={t}")
    feasible = red_ok if red_ok is not None else direct_ok
    obj = objective(sol.instance.cut_levels(), sol.levels)
    return MaxCutReport(
        n=n,
        omega=sol.instance.omega,
        t=t,
        mode=mode,
        feasible=bool(feasible) and sol.levels.total_mass() == 1,
        objective=obj,
        integral_opt=sol.instance.integral_optimum,
        kernel_dim=kernel,
        reduce_feasible=red_ok,
        direct_feasible=direct_ok,
        runtime_ms=(time.perf_counter() - start) * 1000,
        direct_result=direct,
    )
