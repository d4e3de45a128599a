"""Min-Knapsack with knapsack-cover inequalities: the symmetric gap solution and its certification.

Instance: ``n`` unit items, demand ``1 + 1/(n-1)``. Besides the demand
constraint, the cover inequalities ``sum_{j != e} x_j >= 1`` (one per ``e``)
are added. Every integral solution needs two items, while ``x_j = 1/(n-1)``
costs ``n/(n-1)``.

The pseudo-distribution puts mass on the empty set, on one small level
``beta = floor(log n)``, and on the ``t`` levels ``j n / t``.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .arith import RationalLike, binom, format_rational, to_rational
from .moment import (
    LevelVector,
    LinearConstraint,
    matrix_from_levels,
    matrix_from_marked_levels,
    objective,
    shift_levels,
)
from .psd import PsdCertificate, Verdict, certify_psd, is_psd
from .symmetry import check_marked_reduction, check_reduction

log = logging.getLogger(__name__)

LOGBASES = ("2", "e-floor")


def floor_log(n: int, logbase: str = "2") -> int:
    """``floor(log n)``; base 2 by default, natural log for ``"e-floor"``."""
    if n < 1:
        raise ValueError("floor_log needs n >= 1")
    if logbase == "2":
        return n.bit_length() - 1
    if logbase == "e-floor":
        b = int(math.log(n))
        # guard the float against off-by-one at the boundary
        while math.exp(b + 1) <= n:
            b += 1
        while b > 0 and math.exp(b) > n:
            b -= 1
        return b
    raise ValueError(f"unknown log base {logbase!r}; expected one of {LOGBASES}")


def adjust_n(n_prime: int, t: int) -> int:
    """Round ``n'`` down to a multiple of ``t``."""
    n = (n_prime // t) * t
    if n != n_prime:
        log.warning("n = %d is not a multiple of t = %d; using n = %d", n_prime, t, n)
    return n


def demand_lp_plus(n: int) -> Fraction:
    return 1 + Fraction(1, n - 1)


# ---------------------------------------------------------------------------
# instances and constraints


@dataclass(frozen=True)
class KnapsackInstance:
    costs: tuple[Fraction, ...]
    profits: tuple[Fraction, ...]
    demand: Fraction

    @property
    def n(self) -> int:
        return len(self.costs)

    @classmethod
    def unit(cls, n: int) -> "KnapsackInstance":
        return cls(tuple(Fraction(1) for _ in range(n)), tuple(Fraction(1) for _ in range(n)), demand_lp_plus(n))


@dataclass(frozen=True)
class CoverConstraintSet:
    demand: LinearConstraint
    covers: tuple[LinearConstraint, ...]

    @property
    def constraints(self) -> tuple[LinearConstraint, ...]:
        return (self.demand,) + self.covers


def lp_plus_constraints(n: int) -> CoverConstraintSet:
    """Demand constraint plus the ``n`` covers of size ``n - 1``."""
    demand = LinearConstraint.sum_at_least(n, demand_lp_plus(n))
    covers = tuple(
        LinearConstraint.sum_at_least(n, 1, [j for j in range(1, n + 1) if j != e]) for e in range(1, n + 1)
    )
    return CoverConstraintSet(demand, covers)


def wolsey_inequalities(costs: Sequence[RationalLike], profits: Sequence[RationalLike], demand: RationalLike) -> list[LinearConstraint]:
    """``sum_{j not in A} min(p_j, P - p(A)) x_j >= P - p(A)`` for every ``A`` with ``p(A) < P``."""
    p = [to_rational(x) for x in profits]
    if len(costs) != len(p):
        raise ValueError("costs and profits differ in length")
    big_p = to_rational(demand)
    n = len(p)
    out = []
    for size in range(n + 1):
        for a in combinations(range(n), size):
            residual = big_p - sum((p[i] for i in a), Fraction(0))
            if residual <= 0:
                continue
            aset = set(a)
            coeffs = tuple(Fraction(0) if j in aset else min(p[j], residual) for j in range(n))
            out.append(LinearConstraint(coeffs, -residual))
    return out


# ---------------------------------------------------------------------------
# the gap solution


@dataclass(frozen=True)
class GapSolution:
    n: int
    t: int
    epsilon: Fraction
    logpoint: int
    logbase: str
    levels: LevelVector
    demand: Fraction  # n/(n-1) for the cover-strengthened LP; P < 1 for the plain LP

    @property
    def cover_mode(self) -> bool:
        return self.demand == demand_lp_plus(self.n)

    def objective(self) -> Fraction:
        return objective(list(range(self.n + 1)), self.levels)

    def integral_optimum(self) -> int:
        return 2 if self.cover_mode else 1


def _grid_levels(n: int, t: int) -> list[int]:
    return [j * n // t for j in range(1, t + 1)]


def _small_mass(n: int, demand: Fraction, beta: int, cover_mode: bool) -> Fraction:
    """Total weight ``C(n, beta) y_beta`` divided by ``(1 + eps)``."""
    if cover_mode:
        return Fraction(n, n - 1) / beta
    return demand / beta


def epsilon_max(n: int, t: int, logpoint: int, demand: Fraction | None = None) -> Fraction:
    """Largest ``eps`` that keeps the empty-set weight non-negative."""
    demand = demand_lp_plus(n) if demand is None else demand
    small = _small_mass(n, demand, logpoint, demand == demand_lp_plus(n))
    grid = sum((Fraction(t, j * n) for j in range(1, t + 1)), Fraction(0))
    bound = (1 - small) / (small + grid)
    return bound


def _build(n: int, t: int, epsilon: Fraction, logpoint: int, logbase: str, demand: Fraction) -> GapSolution:
    if t < 1 or n % t:
        raise ValueError(f"t = {t} must divide n = {n}; see adjust_n")
    if not 1 <= logpoint <= n:
        raise ValueError(f"small level {logpoint} outside 1..{n}")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    cover_mode = demand == demand_lp_plus(n)
    vals = [Fraction(0)] * (n + 1)
    vals[logpoint] += (1 + epsilon) * _small_mass(n, demand, logpoint, cover_mode) / binom(n, logpoint)
    for j, k in enumerate(_grid_levels(n, t), start=1):
        # level collisions (k == logpoint) add up
        vals[k] += epsilon * t / (j * n) / binom(n, k)
    rest = sum((binom(n, k) * vals[k] for k in range(1, n + 1)), Fraction(0))
    vals[0] = 1 - rest
    if vals[0] < 0:
        raise ValueError(
            f"epsilon = {epsilon} makes the empty-set weight negative; need epsilon <= {epsilon_max(n, t, logpoint, demand)}"
        )
    sol = GapSolution(n, t, epsilon, logpoint, logbase, LevelVector(n, tuple(vals)), demand)
    return sol


def gap_solution(n: int, t: int, epsilon: RationalLike, logbase: str = "2", logpoint: int | None = None) -> GapSolution:
    """Symmetric solution for the cover-strengthened LP with objective ``n/(n-1) (1+eps) + eps t``."""
    eps = to_rational(epsilon)
    beta = floor_log(n, logbase) if logpoint is None else logpoint
    sol = _build(n, t, eps, beta, logbase, demand_lp_plus(n))
    expected = Fraction(n, n - 1) * (1 + eps) + eps * t
    if sol.objective() != expected:
        raise AssertionError(f"objective {sol.objective()} != {expected}")
    return sol


def theorem3_solution(n: int, t: int, epsilon: RationalLike, demand: RationalLike, logbase: str = "2", logpoint: int | None = None) -> GapSolution:
    """Solution for the plain LP ``min sum x_j, sum x_j >= P`` with ``0 < P < 1``.

    The small level carries total weight ``(1 + eps) P / beta``, so the
    objective is ``P (1 + eps) + eps t`` against an integral optimum of 1.
    """
    big_p = to_rational(demand)
    if not 0 < big_p < 1:
        raise ValueError("demand must satisfy 0 < P < 1")
    eps = to_rational(epsilon)
    beta = floor_log(n, logbase) if logpoint is None else logpoint
    sol = _build(n, t, eps, beta, logbase, big_p)
    expected = big_p * (1 + eps) + eps * t
    if sol.objective() != expected:
        raise AssertionError(f"objective {sol.objective()} != {expected}")
    return sol


# ---------------------------------------------------------------------------
# constraint matrices


def condition_levels(sol: GapSolution) -> LevelVector:
    """``w_0 = -n/(n-1)``, ``w_k = y_k (k - 2)``: the levels of the sufficient matrix condition."""
    n = sol.n
    vals = [Fraction(-n, n - 1)] + [sol.levels[k] * (k - 2) for k in range(1, n + 1)]
    return LevelVector(n, tuple(vals))


def demand_levels(sol: GapSolution) -> LevelVector:
    return shift_levels(LinearConstraint.sum_at_least(sol.n, sol.demand), sol.levels)


def cover_values(sol: GapSolution) -> dict[tuple[int, int], Fraction]:
    """``z^N_H`` for the cover missing item ``e``, keyed by ``(|H|, |H & {e}|)``: ``(|H \\ {e}| - 1) y_|H|``."""
    out = {}
    for k in range(sol.n + 1):
        y = sol.levels[k]
        if y == 0:
            continue
        for m in (0, 1):
            if m <= k and k - m <= sol.n - 1:
                out[(k, m)] = (k - m - 1) * y
    return out


def cover_matrix(sol: GapSolution, excluded: int, q: int):
    return matrix_from_marked_levels(cover_values(sol), sol.n, [excluded], q)


# ---------------------------------------------------------------------------
# verdicts


def _symmetric_verdict(z: LevelVector, q: int, method: str) -> tuple[bool, object]:
    if method == "reduce":
        rep = check_reduction(z, q)
        return rep.feasible, rep
    if method == "direct":
        res = certify_psd(matrix_from_levels(z, q))
        return is_psd(res), res
    raise ValueError(f"unknown method {method!r}")


@dataclass
class Lemma2Report:
    preconditions_ok: bool
    precondition_notes: list[str]
    condition_ok: bool  # sufficient matrix condition
    demand_ok: bool
    cover_ok: dict[int, bool]
    results: dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def covers_ok(self) -> bool:
        return all(self.cover_ok.values())

    @property
    def implication_holds(self) -> bool:
        return not self.condition_ok or (self.demand_ok and self.covers_ok)

    @property
    def passed(self) -> bool:
        return self.preconditions_ok and self.condition_ok and self.demand_ok and self.covers_ok


def lemma2_check(sol: GapSolution, t: int | None = None, method: str = "direct", covers: str | Iterable[int] = "all") -> Lemma2Report:
    """Certify the sufficient condition and, independently, the demand and cover constraints at ``P_t(N)``.

    ``method`` is "direct" (factor the full matrices) or "reduce" (block
    reductions; the cover blocks use the symmetry fixing the missing item).
    ``covers`` is "all", "one" (item ``n`` only) or an explicit list of items.
    """
    if not sol.cover_mode:
        raise ValueError("lemma2_check applies to the cover-strengthened LP")
    t = sol.t if t is None else t
    n = sol.n
    notes = []
    if sol.levels[1] != 0:
        notes.append("weight on singletons is non-zero")
    if sol.levels[0] > 1:
        notes.append("empty-set weight exceeds 1")
    cond_ok, cond_res = _symmetric_verdict(condition_levels(sol), t, method)
    dem_ok, dem_res = _symmetric_verdict(demand_levels(sol), t, method)
    if covers == "all":
        items = list(range(1, n + 1))
    elif covers == "one":
        items = [n]
    else:
        items = list(covers)
    cover_ok = {}
    results = {"condition": cond_res, "demand": dem_res}
    shared = check_marked_reduction(cover_values(sol), n, t) if method == "reduce" else None
    for e in items:
        if shared is not None:
            cover_ok[e] = shared.feasible
            results[f"cover_{e}"] = shared
        else:
            res = certify_psd(cover_matrix(sol, e, t))
            cover_ok[e] = is_psd(res)
            results[f"cover_{e}"] = res
    return Lemma2Report(not notes, notes, cond_ok, dem_ok, cover_ok, results)


@dataclass
class FeasibilityReport:
    sum_ok: bool
    moment_ok: bool  # moment matrix over P_{t+1}
    constraint_ok: dict[str, bool]
    methods: dict[str, str] = field(default_factory=dict)
    results: dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def feasible(self) -> bool:
        return self.sum_ok and self.moment_ok and all(self.constraint_ok.values())


def _dim(n: int, q: int) -> int:
    return sum(binom(n, i) for i in range(q + 1))


def certify_solution(
    sol: GapSolution, t: int | None = None, direct_limit: int = 150, direct_covers: int | None = None
) -> FeasibilityReport:
    """Certify every relaxation condition: total mass 1, the moment matrix over ``P_{t+1}``, each constraint over ``P_t``.

    Every matrix is certified through its block reduction. Matrices of dimension
    at most ``direct_limit`` are also factored directly, and the two verdicts
    must agree. The cover matrices for different items are permutations of one
    another, so the reduced blocks coincide; small instances still factor them
    directly (every one, or the first ``direct_covers`` items when given).
    """
    t = sol.t if t is None else t
    n = sol.n
    results: dict[str, object] = {}
    methods: dict[str, str] = {}
    verdicts: dict[str, bool] = {}

    def run(name: str, reduced, direct_builder, q: int, allow_direct: bool = True) -> bool:
        results[f"{name}_reduce"] = reduced
        ok = reduced.feasible
        methods[name] = "reduce"
        if allow_direct and _dim(n, q) <= direct_limit:
            direct = certify_psd(direct_builder())
            results[f"{name}_direct"] = direct
            methods[name] = "reduce+direct"
            if is_psd(direct) != ok:
                raise AssertionError(f"reduced and direct verdicts disagree for {name}")
        return ok

    sum_ok = sol.levels.total_mass() == 1
    q = min(t + 1, n)
    moment_ok = run("moment", check_reduction(sol.levels, q), lambda: matrix_from_levels(sol.levels, q), q)
    dem = demand_levels(sol)
    verdicts["demand"] = run("demand", check_reduction(dem, t), lambda: matrix_from_levels(dem, t), t)
    if sol.cover_mode:
        cover_red = check_marked_reduction(cover_values(sol), n, t)
        for e in range(1, n + 1):
            sampled = direct_covers is None or e <= direct_covers
            verdicts[f"cover_{e}"] = run(f"cover_{e}", cover_red, lambda e=e: cover_matrix(sol, e, t), t, sampled)
    return FeasibilityReport(sum_ok, moment_ok, verdicts, methods, results)


def probe(sol: GapSolution, t: int | None = None) -> bool:
    """Feasibility predicate used while searching over ``eps``: the same conditions, block reductions only."""
    t = sol.t if t is None else t
    if sol.levels.total_mass() != 1:
        return False
    if not check_reduction(sol.levels, min(t + 1, sol.n)).feasible:
        return False
    if not check_reduction(demand_levels(sol), t).feasible:
        return False
    if sol.cover_mode and not check_marked_reduction(cover_values(sol), sol.n, t).feasible:
        return False
    return True


def probe_with_condition(sol: GapSolution, t: int | None = None) -> bool:
    """:func:`probe` plus the sufficient matrix condition (stricter; fails at small ``n``)."""
    t = sol.t if t is None else t
    return probe(sol, t) and check_reduction(condition_levels(sol), t).feasible


# ---------------------------------------------------------------------------
# root form


def _isqrt_rational(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def pair_factor(a: Fraction, b: Fraction, k: int) -> Fraction:
    """``((r-k)/r)^2 ((rbar-k)/rbar)^2`` for ``r = a + b i``."""
    mod2 = a * a + b * b
    return ((a - k) ** 2 + b * b) ** 2 / mod2**2


def real_factor(r: Fraction, k: int) -> Fraction:
    return ((r - k) / r) ** 2


def _collapse_modulus(a: Fraction, b: Fraction, n: int) -> Fraction:
    """A rational ``r`` with ``pair_factor(a, b, k) >= real_factor(r, k)^2`` for ``k = 1..n``.

    The exact modulus is used when it is rational; otherwise rational
    approximations of it are tried until the inequality holds at every ``k``.
    """
    mod2 = a * a + b * b
    exact = _isqrt_rational(mod2)
    if exact is not None:
        return exact
    guess = Fraction(math.sqrt(float(mod2))).limit_denominator(1 << 20)
    for den_bits in range(20, 80, 4):
        for cand in (guess, Fraction(math.isqrt((mod2 * (1 << 2 * den_bits)).__floor__()), 1 << den_bits)):
            if cand > 0 and all(pair_factor(a, b, k) >= real_factor(cand, k) ** 2 for k in range(1, n + 1)):
                return cand
        guess = Fraction(math.isqrt((mod2 * (1 << 2 * den_bits)).__ceil__()), 1 << den_bits)
    raise ValueError(f"no rational stand-in found for the modulus of {a} + {b}i")


Root = "Fraction | tuple[Fraction, Fraction]"


def normalize_roots(roots: Sequence, t: int, n: int) -> list[Fraction]:
    """Replace a root multiset by ``t`` real roots in ``[1, n]`` without increasing the root-form sum.

    ``roots`` items are rationals (real roots) or pairs ``(a, b)`` standing for
    the conjugate pair ``a +- b i``. Steps: conjugate pair -> double root at the
    modulus; negative -> absolute value; below 1 -> 1; above n -> n; pad with n.
    """
    out: list[Fraction] = []
    for r in roots:
        if isinstance(r, tuple):
            a, b = to_rational(r[0]), to_rational(r[1])
            if b == 0:
                out.extend([a, a])
                continue
            m = _collapse_modulus(a, b, n)
            out.extend([m, m])
        else:
            out.append(to_rational(r))
    if len(out) > t:
        raise ValueError(f"{len(out)} roots given for a degree-{t} polynomial")
    result = []
    for r in out:
        if r == 0:
            raise ValueError("a root at 0 makes the condition trivial (P(0) = 0) and has no normalized form")
        r = abs(r)
        r = max(r, Fraction(1))
        r = min(r, Fraction(n))
        result.append(r)
    result.extend([Fraction(n)] * (t - len(result)))
    return result


def root_form_lhs(sol: GapSolution, roots: Sequence) -> Fraction:
    """``sum_{k>=1} C(n,k) y_k (k-2) prod ((r-k)/r)^2`` for real roots and conjugate pairs ``(a, b)``."""
    total = Fraction(0)
    for k in range(1, sol.n + 1):
        y = sol.levels[k]
        if y == 0:
            continue
        prod = Fraction(1)
        for r in roots:
            if isinstance(r, tuple):
                prod *= pair_factor(to_rational(r[0]), to_rational(r[1]), k)
            else:
                prod *= real_factor(to_rational(r), k)
        total += binom(sol.n, k) * y * (k - 2) * prod
    return total


def condition14_check(sol: GapSolution, roots: Sequence[RationalLike]) -> Fraction:
    """``sum_{k>=1} C(n,k) y_k (k-2) prod (r_i-k)^2 - n/(n-1) prod r_i^2`` for real roots."""
    rs = [to_rational(r) for r in roots]
    n = sol.n
    lhs = Fraction(0)
    for k in range(1, n + 1):
        y = sol.levels[k]
        if y == 0:
            continue
        prod = Fraction(1)
        for r in rs:
            prod *= (r - k) ** 2
        lhs += binom(n, k) * y * (k - 2) * prod
    rhs = Fraction(n, n - 1)
    for r in rs:
        rhs *= r * r
    return lhs - rhs


# ---------------------------------------------------------------------------
# epsilon search


def paper_epsilon(n: int, t: int, logbase: str = "2") -> float:
    """The asymptotic choice ``max{(1-2/beta)^-1 (1-beta/alpha)^-2t - 1, n/(n-1) 2 alpha^2/n^2 (2t)^2t}``.

    ``alpha = log^3 n``, ``beta = floor(log n)``. Floating point, for reports only.
    """
    ln = math.log2(n) if logbase == "2" else math.log(n)
    alpha = ln**3
    beta = floor_log(n, logbase)
    first = math.inf if beta <= 2 or alpha <= beta else (1 / (1 - 2 / beta)) * (1 - beta / alpha) ** (-2 * t) - 1
    second = n / (n - 1) * 2 * alpha**2 / n**2 * (2 * t) ** (2 * t)
    return max(first, second)


def dyadic_floor(x: Fraction, bits: int = 64) -> Fraction:
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


@dataclass
class SearchResult:
    n: int
    t: int
    logbase: str
    logpoint: int
    demand: Fraction
    epsilon_max: Fraction
    profile: list[tuple[Fraction, bool]]
    epsilon: Fraction | None
    solution: GapSolution | None
    certificate: FeasibilityReport | None
    probes: int
    runtime_ms: float
    lemma2: Lemma2Report | None = None

    @property
    def feasible(self) -> bool:
        return self.certificate is not None and self.certificate.feasible

    @property
    def objective(self) -> Fraction | None:
        return self.solution.objective() if self.solution else None

    @property
    def gap(self) -> Fraction | None:
        if self.solution is None:
            return None
        return self.solution.integral_optimum() / self.objective


def epsilon_search(
    n: int,
    t: int,
    logbase: str = "2",
    demand: RationalLike | None = None,
    grid_points: int = 64,
    ratio: Fraction = Fraction(3, 4),
    bisect_steps: int = 24,
    certify: bool = True,
    direct_covers: int | None = None,
    predicate: Callable[[GapSolution], bool] | None = None,
) -> SearchResult:
    """Find a small ``eps`` for which the gap solution passes every check.

    A geometric grid ``eps_max * ratio^i`` (dyadic, denominator ``2^64``) is
    probed first, without assuming monotonicity. The widest run of passing grid
    points is then bisected towards its lower end, where the objective is
    smallest. The chosen ``eps`` is finally certified in full.
    """
    start = time.perf_counter()
    if n % t:
        raise ValueError(f"t = {t} must divide n = {n}; see adjust_n")
    beta = floor_log(n, logbase)
    big_p = demand_lp_plus(n) if demand is None else to_rational(demand)
    cover_mode = big_p == demand_lp_plus(n)

    def make(eps: Fraction) -> GapSolution:
        if cover_mode:
            return gap_solution(n, t, eps, logbase)
        return theorem3_solution(n, t, eps, big_p, logbase)

    check = predicate or probe
    eps_hi = epsilon_max(n, t, beta, big_p)
    count = 0

    def passes(eps: Fraction) -> bool:
        nonlocal count
        count += 1
        try:
            sol = make(eps)
        except ValueError:
            return False
        return check(sol)

    grid = sorted({dyadic_floor(eps_hi * ratio**i) for i in range(grid_points)} - {Fraction(0)}) if eps_hi > 0 else []
    profile = [(e, passes(e)) for e in grid]

    # widest run of consecutive passing grid points, measured in eps
    best: tuple[Fraction, int, int] | None = None
    i = 0
    while i < len(profile):
        if profile[i][1]:
            j = i
            while j + 1 < len(profile) and profile[j + 1][1]:
                j += 1
            width = profile[j][0] - (profile[i - 1][0] if i > 0 else Fraction(0))
            if best is None or width > best[0]:
                best = (width, i, j)
            i = j + 1
        else:
            i += 1

    eps_found = None
    if best is not None:
        _, i, _ = best
        lo = profile[i - 1][0] if i > 0 else Fraction(0)
        hi = profile[i][0]
        for _ in range(bisect_steps):
            mid = dyadic_floor((lo + hi) / 2)
            if mid <= lo or mid >= hi:
                break
            if passes(mid):
                hi = mid
            else:
                lo = mid
        eps_found = hi

    sol = cert = lem = None
    if eps_found is not None:
        sol = make(eps_found)
        if certify:
            cert = certify_solution(sol, direct_covers=direct_covers)
            if cover_mode:
                lem = lemma2_check(sol, method="reduce")
    return SearchResult(
        n=n,
        t=t,
        logbase=logbase,
        logpoint=beta,
        demand=big_p,
        epsilon_max=eps_hi,
        profile=profile,
        epsilon=eps_found,
        solution=sol,
        certificate=cert,
        probes=count,
        runtime_ms=(time.perf_counter() - start) * 1000,
        lemma2=lem,
    )


def search_report(res: SearchResult) -> dict:
    out = {
        "n": res.n,
        "t": res.t,
        "logbase": res.logbase,
        "small_level": res.logpoint,
        "demand": format_rational(res.demand),
        "relaxation": "LP+ (demand and cover inequalities)" if res.demand == demand_lp_plus(res.n) else "plain LP (demand only)",
        "feasible": res.feasible,
        "epsilon": format_rational(res.epsilon) if res.epsilon is not None else None,
        "epsilon_approx": float(res.epsilon) if res.epsilon is not None else None,
        "epsilon_max": format_rational(res.epsilon_max),
        "epsilon_max_approx": float(res.epsilon_max),
        "probes": res.probes,
        "runtime_ms": round(res.runtime_ms, 3),
    }
    if res.demand == demand_lp_plus(res.n):
        pe = paper_epsilon(res.n, res.t, res.logbase)
        out["paper_epsilon_approx"] = pe
        out["paper_epsilon"] = format_rational(Fraction(pe)) if math.isfinite(pe) else None
    else:
        out["note"] = (
            "the source states this construction for SoS_t(LP+) while describing the plain LP; "
            "the plain-LP reading (single demand constraint) is implemented"
        )
    if res.solution is not None:
        obj = res.objective
        out["objective"] = format_rational(obj)
        out["objective_approx"] = float(obj)
        out["integral_opt"] = res.solution.integral_optimum()
        out["gap"] = format_rational(res.gap)
        out["gap_approx"] = float(res.gap)
        out["levels"] = res.solution.levels.to_json()
    if res.certificate is not None:
        out["sum_ok"] = res.certificate.sum_ok
        out["moment_ok"] = res.certificate.moment_ok
        out["per_constraint_verdicts"] = dict(res.certificate.constraint_ok)
        out["methods"] = dict(res.certificate.methods)
    if res.lemma2 is not None:
        out["sufficient_condition"] = {
            "condition": res.lemma2.condition_ok,
            "demand": res.lemma2.demand_ok,
            "covers": res.lemma2.covers_ok,
            "implication_holds": res.lemma2.implication_holds,
        }
    out["profile"] = [{"epsilon": format_rational(e), "epsilon_approx": float(e), "pass": ok} for e, ok in res.profile]
    return out
