"""Reduction of symmetric moment-matrix PSD tests to small blocks.

For a symmetric level vector ``z`` the matrix ``M = sum_k z_k sum_{|I|=k} Z_I Z_I^T``
over ``P_t(N)`` has eigenvectors of the form ``u_h = sum alpha_{i,j} b_{i,j}``
(``h = 0..t``), and ``falling(n,h) * u_h^T M u_h = sum_k z_k C(n,k) G_h(k; alpha)``.
``G_h`` is quadratic in ``alpha``, so "non-negative for every alpha" is the
same as PSD-ness of one small Gram-type matrix ``Q_h`` per ``h``. Checking
``Q_0..Q_t`` is therefore equivalent to checking ``M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .arith import RationalLike, binom, falling_factorial, subset_masks, to_rational
from .moment import LevelVector
from .polynomial import PolynomialQ, count_roots_open, odd_multiplicity_part, sturm_sequence
from .psd import IndefWitness, InvariantBreach, PsdCertificate, Verdict, alpha_indices, certify_psd, check_alpha, structured_vector


def _check_hth(h: int, t: int, n: int) -> None:
    if not 0 <= h <= t <= n:
        raise ValueError(f"need 0 <= h <= t <= n, got h={h}, t={t}, n={n}")


# ---------------------------------------------------------------------------
# the G_h family


@dataclass(frozen=True)
class GhPolynomial:
    h: int
    t: int
    n: int
    alpha: Mapping[tuple[int, int], Fraction]
    expanded: PolynomialQ

    def __call__(self, k: RationalLike) -> Fraction:
        return self.expanded(k)

    evaluate = __call__


def _p_poly(j: int, r: int, t: int, alpha: Mapping[tuple[int, int], Fraction]) -> PolynomialQ:
    """``p_j(k - r) = sum_i alpha_{i+j,j} binom(k - r, i)`` as a polynomial in ``k``."""
    out = PolynomialQ()
    for i in range(t - j + 1):
        a = alpha.get((i + j, j))
        if a:
            out = out + PolynomialQ.newton_binom(-r, i).scale(a)
    return out


def _h_r(r: int, h: int, n: int) -> PolynomialQ:
    """``falling(k, r) * falling(n - k, h - r)`` as a polynomial in ``k``."""
    return PolynomialQ.falling(0, r) * PolynomialQ.falling(n, h - r, sign=-1)


def build_gh(h: int, t: int, n: int, alpha: Mapping[tuple[int, int], RationalLike]) -> GhPolynomial:
    """Expand ``G_h(k) = sum_r C(h,r) h_r(k) (sum_j C(r,j) p_j(k-r))^2`` into monomial coefficients."""
    _check_hth(h, t, n)
    al = check_alpha(alpha, h, t)
    total = PolynomialQ()
    for r in range(h + 1):
        inner = PolynomialQ()
        for j in range(min(r, h) + 1):
            inner = inner + _p_poly(j, r, t, al).scale(binom(r, j))
        if inner.is_zero():
            continue
        total = total + (_h_r(r, h, n) * inner * inner).scale(binom(h, r))
    if total.degree > 2 * t:
        raise InvariantBreach(f"G_{h} has degree {total.degree} > 2t = {2 * t}")
    return GhPolynomial(h, t, n, al, total)


def c_polynomial(h: int, n: int, f_values, bound: int) -> PolynomialQ:
    """``C(k) = sum_r C(h,r) falling(k,r) falling(n-k,h-r) f(r)`` for ``f`` given by its values at ``r = 0..h``.

    Raises :class:`InvariantBreach` if the degree exceeds ``bound`` (the degree of ``f``).
    """
    out = PolynomialQ()
    for r in range(h + 1):
        fr = to_rational(f_values(r))
        if fr:
            out = out + _h_r(r, h, n).scale(binom(h, r) * fr)
    if out.degree > bound:
        raise InvariantBreach(f"C(k) has degree {out.degree} > {bound}")
    return out


def gh_by_degree_decomposition(h: int, t: int, n: int, alpha: Mapping[tuple[int, int], RationalLike]) -> PolynomialQ:
    """Second expansion of ``G_h`` through the ``B(k) = binom(k-h,q) binom(k-h,s) C(k)`` split.

    Uses ``binom(k-r, a) = sum_q binom(k-h, q) binom(h-r, a-q)`` and checks every
    intermediate ``C(k)`` against its degree bound ``i + j + (a-q) + (b-s)``.
    """
    _check_hth(h, t, n)
    al = check_alpha(alpha, h, t)
    total = PolynomialQ()
    newton = {q: PolynomialQ.newton_binom(-h, q) for q in range(t + 1)}
    c_cache: dict[tuple[int, int, int, int], PolynomialQ] = {}
    for i in range(h + 1):
        for j in range(h + 1):
            for a in range(t - i + 1):
                aa = al.get((a + i, i))
                if not aa:
                    continue
                for b in range(t - j + 1):
                    ab = al.get((b + j, j))
                    if not ab:
                        continue
                    for q in range(a + 1):
                        for s in range(b + 1):
                            key = (i, j, a - q, b - s)
                            if key not in c_cache:
                                c_cache[key] = c_polynomial(
                                    h,
                                    n,
                                    lambda r, i=i, j=j, x=a - q, y=b - s: binom(r, i) * binom(r, j) * binom(h - r, x) * binom(h - r, y),
                                    i + j + (a - q) + (b - s),
                                )
                            c = c_cache[key]
                            if c.is_zero():
                                continue
                            total = total + (newton[q] * newton[s] * c).scale(aa * ab)
    if total.degree > 2 * t:
        raise InvariantBreach(f"G_{h} has degree {total.degree} > 2t = {2 * t}")
    return total


# ---------------------------------------------------------------------------
# reduced blocks


@dataclass(frozen=True)
class ReducedBlock:
    """``Q_h`` with ``alpha^T Q_h alpha = sum_k z_k C(n,k) G_h(k; alpha)``; rows follow :func:`alpha_indices`."""

    h: int
    t: int
    n: int
    index: tuple[tuple[int, int], ...]
    data: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.index)

    def quadratic_form(self, alpha: Mapping[tuple[int, int], RationalLike]) -> Fraction:
        al = check_alpha(alpha, self.h, self.t)
        vec = [al.get(ix, Fraction(0)) for ix in self.index]
        total = Fraction(0)
        for a, va in enumerate(vec):
            if va:
                row = self.data[a]
                total += va * sum((row[b] * vb for b, vb in enumerate(vec) if vb), Fraction(0))
        return total


def reduced_block(h: int, t: int, n: int, z: LevelVector) -> ReducedBlock:
    _check_hth(h, t, n)
    if z.n != n:
        raise ValueError("level vector has the wrong n")
    index = tuple(alpha_indices(h, t))
    dim = len(index)
    acc = [[Fraction(0)] * dim for _ in range(dim)]
    for k in range(n + 1):
        zk = z[k]
        if zk == 0:
            continue
        base = zk * binom(n, k)
        for r in range(h + 1):
            hr = falling_factorial(k, r) * falling_factorial(n - k, h - r)
            if hr == 0:
                continue
            w = base * binom(h, r) * hr
            c = [binom(r, j) * binom(k - r, i - j) for (i, j) in index]
            nz = [(a, ca) for a, ca in enumerate(c) if ca]
            for a, ca in nz:
                row = acc[a]
                wa = w * ca
                for b, cb in nz:
                    row[b] += wa * cb
    return ReducedBlock(h, t, n, index, tuple(tuple(r) for r in acc))


@dataclass
class ReductionReport:
    t: int
    n: int
    verdicts: dict[int, Verdict | None]  # None: skipped, trivially PSD for h > n/2
    blocks: dict[int, ReducedBlock]

    @property
    def feasible(self) -> bool:
        return all(v is None or isinstance(v, PsdCertificate) for v in self.verdicts.values())

    def failing(self) -> list[int]:
        return [h for h, v in self.verdicts.items() if isinstance(v, IndefWitness)]


def check_reduction(z: LevelVector, t: int) -> ReductionReport:
    """Certify every ``Q_h`` (``h = 0..t``); all PSD iff the degree-``t`` moment matrix of ``z`` is PSD."""
    n = z.n
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}, n={n}")
    verdicts: dict[int, Verdict | None] = {}
    blocks: dict[int, ReducedBlock] = {}
    for h in range(t + 1):
        if h > n // 2:
            # G_h vanishes at every integer 0..n, so Q_h is the zero matrix
            verdicts[h] = None
            continue
        block = reduced_block(h, t, n, z)
        blocks[h] = block
        verdicts[h] = certify_psd(block)
    return ReductionReport(t, n, verdicts, blocks)


# ---------------------------------------------------------------------------
# one marked element


@dataclass(frozen=True)
class MarkedBlock:
    """Reduced block for ``sum_I w(|I \\ {e}|, [e in I]) Z_I Z_I^T`` under the permutations fixing ``e``.

    Rows are ``(0, i, j)`` for sets avoiding ``e`` (``|A| = i``, ``|A & H| = j``)
    followed by ``(1, i, j)`` for sets ``A' + {e}`` with ``|A'| = i``.
    """

    h: int
    q: int
    n: int
    index: tuple[tuple[int, int, int], ...]
    data: tuple[tuple[Fraction, ...], ...] = field(repr=False)


def marked_reduced_block(h: int, q: int, n: int, values: Mapping[tuple[int, int], Fraction]) -> MarkedBlock:
    """``values[(k, m)]`` is the weight of a set of size ``k`` holding ``m`` copies of ``e`` (``m`` in {0, 1}).

    The quadratic form of the result at ``(alpha0, alpha1)`` equals
    ``falling(n-1, h)`` times that of the full matrix at the matching structured vector.
    """
    m = n - 1
    if not 0 <= h <= q <= n:
        raise ValueError(f"need 0 <= h <= q <= n, got h={h}, q={q}, n={n}")
    idx0 = alpha_indices(h, q)
    idx1 = alpha_indices(h, q - 1) if h <= q - 1 else []
    index = tuple((0, i, j) for i, j in idx0) + tuple((1, i, j) for i, j in idx1)
    dim = len(index)
    off = len(idx0)
    acc = [[Fraction(0)] * dim for _ in range(dim)]

    def add(w: Fraction, vec: list[tuple[int, int]]) -> None:
        for a, ca in vec:
            row = acc[a]
            wa = w * ca
            for b, cb in vec:
                row[b] += wa * cb

    for k in range(m + 1):
        w0 = values.get((k, 0), Fraction(0))
        w1 = values.get((k + 1, 1), Fraction(0))
        if w0 == 0 and w1 == 0:
            continue
        base = binom(m, k)
        for r in range(h + 1):
            hr = falling_factorial(k, r) * falling_factorial(m - k, h - r)
            if hr == 0:
                continue
            mult = base * binom(h, r) * hr
            c0 = [(a, binom(r, j) * binom(k - r, i - j)) for a, (i, j) in enumerate(idx0)]
            c0 = [(a, c) for a, c in c0 if c]
            if w0:
                add(mult * w0, c0)
            if w1:
                c1 = [(off + a, binom(r, j) * binom(k - r, i - j)) for a, (i, j) in enumerate(idx1)]
                add(mult * w1, c0 + [(a, c) for a, c in c1 if c])
    return MarkedBlock(h, q, n, index, tuple(tuple(r) for r in acc))


def check_marked_reduction(values: Mapping[tuple[int, int], Fraction], n: int, q: int) -> ReductionReport:
    """All marked blocks PSD iff the matrix built by ``matrix_from_marked_levels(values, n, [e], q)`` is PSD."""
    verdicts: dict[int, Verdict | None] = {}
    blocks: dict[int, MarkedBlock] = {}
    for h in range(q + 1):
        if h > (n - 1) // 2:
            # no irreducible of this shape for n - 1 points
            verdicts[h] = None
            continue
        block = marked_reduced_block(h, q, n, values)
        blocks[h] = block
        verdicts[h] = certify_psd(block.data)
    return ReductionReport(q, n, verdicts, blocks)


# ---------------------------------------------------------------------------
# property checks


@dataclass
class Lemma8Report:
    degree: int
    degree_ok: bool
    zeros_ok: bool
    nonnegative_ok: bool
    failures: list[str]

    @property
    def ok(self) -> bool:
        return self.degree_ok and self.zeros_ok and self.nonnegative_ok


def nonnegative_on_interval(p: PolynomialQ, lo: RationalLike, hi: RationalLike, step: RationalLike = Fraction(1, 4)) -> tuple[bool, str]:
    """Exact test of ``p >= 0`` on ``[lo, hi]``.

    ``p`` is sampled on a grid; inside each grid cell the odd-multiplicity part
    of ``p`` must have no root (Sturm count), so ``p`` keeps one sign there, and
    the cell midpoint fixes that sign.
    """
    lo, hi, step = to_rational(lo), to_rational(hi), to_rational(step)
    if lo > hi:
        return True, "empty interval"
    if p.is_zero():
        return True, "zero polynomial"
    odd = odd_multiplicity_part(p)
    seq = sturm_sequence(odd) if odd.degree >= 1 else None
    x = lo
    while True:
        if p(x) < 0:
            return False, f"negative at {x}"
        nxt = min(x + step, hi)
        if nxt <= x:
            break
        if seq is not None and count_roots_open(odd, x, nxt, seq):
            return False, f"sign change inside ({x}, {nxt})"
        if p((x + nxt) / 2) < 0:
            return False, f"negative inside ({x}, {nxt})"
        x = nxt
    return True, "ok"


def lemma8_suite(gh: GhPolynomial) -> Lemma8Report:
    """Degree at most 2t, exact zeros at ``{0..h-1} u {n-h+1..n}``, non-negativity on ``[h-1, n-h+1]``."""
    h, t, n, p = gh.h, gh.t, gh.n, gh.expanded
    failures = []
    degree_ok = p.degree <= 2 * t
    if not degree_ok:
        failures.append(f"degree {p.degree} > {2 * t}")
    zero_points = sorted(set(range(0, h)) | set(range(n - h + 1, n + 1)))
    bad = [k for k in zero_points if p(k) != 0]
    if bad:
        failures.append(f"non-zero at {bad}")
    ok_b, msg = nonnegative_on_interval(p, h - 1, n - h + 1)
    if not ok_b:
        failures.append(msg)
    return Lemma8Report(p.degree, degree_ok, not bad, ok_b, failures)


def brute_force_a(h: int, t: int, n: int, alpha: Mapping[tuple[int, int], RationalLike]) -> list[Fraction]:
    """``A_k = sum_{|I|=k} (u_h^T Z_I)^2`` by enumerating every subset."""
    u = structured_vector(h, t, n, alpha)
    masks = subset_masks(n, t)
    support = [(m, v) for m, v in zip(masks, u.vector) if v]
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        acc = Fraction(0)
        for combo in combinations(range(n), k):
            big = 0
            for e in combo:
                big |= 1 << e
            s = sum((v for m, v in support if m & ~big == 0), Fraction(0))
            acc += s * s
        out[k] = acc
    return out


@dataclass
class Lemma9Report:
    brute: list[Fraction]
    formula: list[Fraction]
    mismatches: list[int]
    weighted_ok: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.weighted_ok is not False


def lemma9_identity(h: int, t: int, n: int, alpha: Mapping[tuple[int, int], RationalLike], z: LevelVector | None = None) -> Lemma9Report:
    """Compare brute-force ``A_k`` with ``C(n,k) G_h(k) / falling(n,h)`` for all ``k``.

    With ``z`` given, also checks ``sum_k z_k A_k = alpha^T Q_h alpha / falling(n,h)``.
    """
    _check_hth(h, t, n)
    gh = build_gh(h, t, n, alpha)
    ff = falling_factorial(n, h)
    brute = brute_force_a(h, t, n, alpha)
    formula = [binom(n, k) * gh(k) / ff for k in range(n + 1)]
    mism = [k for k in range(n + 1) if brute[k] != formula[k]]
    weighted = None
    if z is not None:
        lhs = sum((z[k] * brute[k] for k in range(n + 1)), Fraction(0))
        weighted = lhs == reduced_block(h, t, n, z).quadratic_form(gh.alpha) / ff
    return Lemma9Report(brute, formula, mism, weighted)


def is_invariant_under(vector, n: int, t: int, perm: Mapping[int, int]) -> bool:
    """Whether ``[P_pi v]_I = v_{pi(I)}`` equals ``v`` for the element permutation ``perm`` (1-based)."""
    masks = subset_masks(n, t)
    index = {m: r for r, m in enumerate(masks)}

    def image(mask: int) -> int:
        out = 0
        for e in range(n):
            if mask >> e & 1:
                out |= 1 << (perm.get(e + 1, e + 1) - 1)
        return out

    return all(vector[index[image(m)]] == vector[r] for r, m in enumerate(masks))



# ---------------------------------------------------------------------------
# coefficient vectors of minimal-H eigenvectors


def _nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Exact basis of ``{x : A x = 0}`` by reduced row echelon form."""
    a = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        lead = a[r][c]
        a[r] = [x / lead for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        x = [Fraction(0)] * ncols
        x[fcol] = Fraction(1)
        for row, pc in zip(a, pivots):
            x[pc] = -row[fcol]
        basis.append(x)
    return basis


def admissible_alpha_basis(h: int, t: int, n: int) -> list[dict[tuple[int, int], Fraction]]:
    """Basis of the coefficient vectors ``alpha`` whose ``u_h`` has a minimal set ``H = {1..h}``.

    Minimality means ``sum_{pi in Pi_S} P_pi u_h = 0`` for every ``|S| < h``, i.e.
    ``sum_{|Q| = i, |Q & S| = j} u_Q = 0`` for all ``i, j``. Only for such
    ``alpha`` does ``G_h`` vanish on ``{0..h-1} u {n-h+1..n}``; the identity
    ``A_k = C(n,k) G_h(k) / falling(n,h)`` and the block reduction hold for every ``alpha``.
    """
    _check_hth(h, t, n)
    index = alpha_indices(h, t)
    col = {ix: c for c, ix in enumerate(index)}
    masks = subset_masks(n, t)
    hmask = (1 << h) - 1
    rows: list[list[Fraction]] = []
    # S up to permutations fixing H: a elements inside H, b outside
    for a in range(0, h):
        for b in range(0, min(n - h, h - 1 - a) + 1):
            s_mask = ((1 << a) - 1) | (((1 << b) - 1) << h)
            eqs: dict[tuple[int, int], list[Fraction]] = {}
            for qm in masks:
                key = (bin(qm).count("1"), bin(qm & s_mask).count("1"))
                row = eqs.setdefault(key, [Fraction(0)] * len(index))
                row[col[(key[0], bin(qm & hmask).count("1"))]] += 1
            rows.extend(eqs.values())
    return [{ix: v for ix, v in zip(index, vec) if v} for vec in _nullspace(rows, len(index))]
