"""Exact PSD decisions for rational symmetric matrices.

:func:`certify_psd` runs a symmetric pivoted LDL^T elimination (largest
remaining diagonal first) and returns either a factorization with a
non-negative diagonal or a vector ``v`` with ``v^T M v < 0``. Both outcomes are
independently re-checkable: :func:`verify_certificate` multiplies the factors
back out and :func:`rayleigh` re-evaluates the quadratic form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .arith import format_rational, popcount, subset_masks, to_rational

try:  # gmpy2 rationals are several times faster than Fraction in the elimination loop
    from gmpy2 import mpq as _fast
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _fast = Fraction


class InvariantBreach(RuntimeError):
    """An internal self-check failed; the result must not be trusted."""


@dataclass(frozen=True)
class PsdCertificate:
    """``P M P^T = L D L^T`` with ``D >= 0``.

    ``permutation[a]`` is the original index placed at position ``a``.
    ``lower[a]`` holds the strictly-lower part of row ``a`` of ``L`` as a
    sparse ``{column: value}`` map (the unit diagonal is implicit).
    """

    permutation: tuple[int, ...]
    diag: tuple[Fraction, ...]
    lower: tuple[Mapping[int, Fraction], ...]

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def positive_pivots(self) -> int:
        return sum(1 for d in self.diag if d > 0)

    @property
    def zero_pivots(self) -> int:
        return sum(1 for d in self.diag if d == 0)

    def to_json(self) -> dict:
        return {
            "kind": "ldl",
            "permutation": list(self.permutation),
            "diag": [format_rational(d) for d in self.diag],
            "lower": [
                [[c, format_rational(v)] for c, v in sorted(row.items())] for row in self.lower
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "PsdCertificate":
        if obj.get("kind") != "ldl":
            raise ValueError("not an LDL certificate")
        return cls(
            tuple(int(p) for p in obj["permutation"]),
            tuple(to_rational(d) for d in obj["diag"]),
            tuple({int(c): to_rational(v) for c, v in row} for row in obj["lower"]),
        )


@dataclass(frozen=True)
class IndefWitness:
    v: tuple[Fraction, ...]
    value: Fraction  # v^T M v, re-evaluated

    def to_json(self) -> dict:
        return {"kind": "witness", "v": [format_rational(x) for x in self.v], "value": format_rational(self.value)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "IndefWitness":
        if obj.get("kind") != "witness":
            raise ValueError("not a witness")
        return cls(tuple(to_rational(x) for x in obj["v"]), to_rational(obj["value"]))


Verdict = Union[PsdCertificate, IndefWitness]


def is_psd(result: Verdict) -> bool:
    return isinstance(result, PsdCertificate)


def _rows(m) -> Sequence[Sequence[Fraction]]:
    return m.data if hasattr(m, "data") else m


def _check_symmetric(rows: Sequence[Sequence[Fraction]]) -> int:
    dim = len(rows)
    for i, row in enumerate(rows):
        if len(row) != dim:
            raise ValueError("matrix is not square")
        for j in range(i):
            if row[j] != rows[j][i]:
                raise ValueError(f"matrix is not symmetric at ({i}, {j})")
    return dim


def rayleigh(m, v: Sequence) -> Fraction:
    """The quadratic form ``v^T M v`` (unnormalized; only its sign and exact value matter)."""
    rows = _rows(m)
    if len(v) != len(rows):
        raise ValueError(f"vector of length {len(v)} does not match matrix of dimension {len(rows)}")
    vv = [to_rational(x) for x in v]
    nz = [i for i, x in enumerate(vv) if x != 0]
    total = Fraction(0)
    for i in nz:
        row = rows[i]
        total += vv[i] * sum((row[j] * vv[j] for j in nz), Fraction(0))
    return total


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator))


def certify_psd(m) -> Verdict:
    """Decide ``M >= 0`` exactly; returns a certificate or a re-verified witness."""
    rows = _rows(m)
    dim = _check_symmetric(rows)
    a = [[_fast(x) for x in row] for row in rows]
    zero = _fast(0)
    active = list(range(dim))
    order: list[int] = []
    diag: list = []
    cols: dict[int, dict[int, object]] = {}

    def witness_from(schur_vec: dict[int, object]) -> IndefWitness:
        x = {i: val for i, val in schur_vec.items()}
        for p in reversed(order):
            acc = zero
            for i, lip in cols[p].items():
                xi = x.get(i)
                if xi is not None:
                    acc += lip * xi
            if acc != 0:
                x[p] = -acc
        v = tuple(_to_fraction(x.get(i, zero)) for i in range(dim))
        value = rayleigh(rows, v)
        if value >= 0:
            raise InvariantBreach("indefiniteness witness failed re-verification")
        return IndefWitness(v, value)

    while active:
        best = max(active, key=lambda i: a[i][i])
        d = a[best][best]
        if d > 0:
            p = best
            arow = a[p]
            active.remove(p)
            col = {}
            for i in active:
                if arow[i] != 0:
                    col[i] = arow[i] / d
            items = list(col.items())
            for i, lip in items:
                ai = a[i]
                for j, _ in items:
                    ai[j] -= lip * arow[j]
            order.append(p)
            diag.append(d)
            cols[p] = col
            continue
        worst = min(active, key=lambda i: a[i][i])
        if a[worst][worst] < 0:
            return witness_from({worst: _fast(1)})
        # every remaining diagonal entry is 0
        for i in active:
            ai = a[i]
            for j in active:
                if j != i and ai[j] != 0:
                    mij = ai[j]
                    djj = a[j][j]
                    s = _fast(1) if djj <= 0 else abs(mij) / djj
                    sign = 1 if mij > 0 else -1
                    return witness_from({i: _fast(1), j: -sign * s})
        for i in active:
            order.append(i)
            diag.append(zero)
            cols[i] = {}
        active = []

    position = {p: k for k, p in enumerate(order)}
    lower: list[dict[int, Fraction]] = [dict() for _ in range(dim)]
    for p, col in cols.items():
        c = position[p]
        for i, lip in col.items():
            lower[position[i]][c] = _to_fraction(lip)
    return PsdCertificate(tuple(order), tuple(_to_fraction(d) for d in diag), tuple(lower))


def verify_certificate(m, cert: PsdCertificate) -> bool:
    """Multiply ``L D L^T`` back out and compare with ``P M P^T`` entry by entry."""
    rows = _rows(m)
    dim = len(rows)
    if cert.dim != dim or sorted(cert.permutation) != list(range(dim)):
        return False
    if any(d < 0 for d in cert.diag):
        return False
    for a, row in enumerate(cert.lower):
        if any(not 0 <= c < a for c in row):
            return False
    perm = cert.permutation
    diag = [_fast(d) for d in cert.diag]
    lower = [{c: _fast(v) for c, v in row.items()} for row in cert.lower]
    # rows of L D, sparse
    scaled = []
    for a in range(dim):
        r = {c: v * diag[c] for c, v in lower[a].items() if diag[c] != 0}
        if diag[a] != 0:
            r[a] = diag[a]
        scaled.append(r)
    zero = _fast(0)
    for a in range(dim):
        ra = scaled[a]
        ma = rows[perm[a]]
        for b in range(a + 1):
            lb = lower[b]
            total = ra.get(b, zero)
            if len(ra) < len(lb):
                for c, v in ra.items():
                    if c < b:
                        w = lb.get(c)
                        if w is not None:
                            total += v * w
            else:
                for c, w in lb.items():
                    v = ra.get(c)
                    if v is not None:
                        total += v * w
            if total != ma[perm[b]]:
                return False
    return True


def verify_witness(m, witness: IndefWitness) -> bool:
    return rayleigh(m, witness.v) < 0


def verify(m, result: Verdict) -> bool:
    if isinstance(result, PsdCertificate):
        return verify_certificate(m, result)
    return verify_witness(m, result)


def result_from_json(obj: Mapping) -> Verdict:
    if obj.get("kind") == "ldl":
        return PsdCertificate.from_json(obj)
    return IndefWitness.from_json(obj)


# ---------------------------------------------------------------------------
# structured vectors


def alpha_indices(h: int, t: int) -> list[tuple[int, int]]:
    """Index pairs ``(i, j)`` with ``0 <= i <= t`` and ``0 <= j <= min(h, i)``."""
    return [(i, j) for i in range(t + 1) for j in range(min(h, i) + 1)]


def check_alpha(alpha: Mapping[tuple[int, int], object], h: int, t: int) -> dict[tuple[int, int], Fraction]:
    valid = set(alpha_indices(h, t))
    out = {}
    for key, value in alpha.items():
        key = (int(key[0]), int(key[1]))
        if key not in valid:
            raise ValueError(f"alpha index {key} outside 0 <= i <= {t}, 0 <= j <= min({h}, i)")
        out[key] = to_rational(value)
    return out


@dataclass(frozen=True)
class StructuredVector:
    h: int
    t: int
    n: int
    alpha: Mapping[tuple[int, int], Fraction]
    vector: tuple[Fraction, ...]


def structured_vector(h: int, t: int, n: int, alpha: Mapping[tuple[int, int], object]) -> StructuredVector:
    """``u_h = sum alpha_{i,j} b_{i,j}`` with ``[b_{i,j}]_Q = 1`` iff ``|Q| = i`` and ``|Q & {1..h}| = j``."""
    if not 0 <= h <= t <= n:
        raise ValueError(f"need 0 <= h <= t <= n, got h={h}, t={t}, n={n}")
    al = check_alpha(alpha, h, t)
    hmask = (1 << h) - 1
    zero = Fraction(0)
    vec = tuple(al.get((popcount(qm), popcount(qm & hmask)), zero) for qm in subset_masks(n, t))
    return StructuredVector(h, t, n, al, vec)
