"""Moment matrices in the zeta-vector basis and in the standard basis.

A pseudo-distribution assigns a weight ``y^N_I`` to every 0/1 point ``x_I``.
Its degree-``q`` moment matrix is ``sum_I y^N_I Z_I Z_I^T`` where ``Z_I`` is the
0/1 vector over ``P_q(N)`` marking the subsets of ``I``. The standard
(Lasserre) coordinates are the upward sums ``y_I = sum_{H >= I} y^N_H``, and the
matrix entry at ``(A, B)`` is ``y_{A u B}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .arith import (
    RationalLike,
    binom,
    format_rational,
    from_mask,
    popcount,
    subset_index,
    subset_masks,
    to_mask,
    to_rational,
)

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class LevelVector:
    """Values of a symmetric set function, one per subset size ``k = 0..n``."""

    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != self.n + 1:
            raise ValueError(f"LevelVector for n={self.n} needs {self.n + 1} values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(to_rational(v) for v in self.values))

    @classmethod
    def of(cls, values: Iterable[RationalLike]) -> "LevelVector":
        vals = tuple(to_rational(v) for v in values)
        return cls(len(vals) - 1, vals)

    @classmethod
    def indicator(cls, n: int, k: int, value: RationalLike = 1) -> "LevelVector":
        vals = [Fraction(0)] * (n + 1)
        vals[k] = to_rational(value)
        return cls(n, tuple(vals))

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def total_mass(self) -> Fraction:
        """sum_k C(n,k) z_k, i.e. the sum of the lifted set function over all subsets."""
        return sum((binom(self.n, k) * v for k, v in enumerate(self.values)), Fraction(0))

    def support(self) -> list[int]:
        return [k for k, v in enumerate(self.values) if v != 0]

    def to_json(self) -> dict:
        return {"n": self.n, "levels": [format_rational(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "LevelVector":
        n = int(obj["n"])
        return cls(n, tuple(to_rational(v) for v in obj["levels"]))


class SetFunction:
    """Sparse map from subsets of ``{1..n}`` to rationals; missing subsets are 0.

    Keys are stored as bitmasks.
    """

    __slots__ = ("n", "_entries")

    def __init__(self, n: int, entries: Mapping | Iterable = ()):
        self.n = n
        self._entries: dict[int, Fraction] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for key, value in items:
            mask = key if isinstance(key, int) else to_mask(key, n)
            if mask >> n:
                raise ValueError(f"subset mask {mask:#x} is not inside N = {{1..{n}}}")
            value = to_rational(value)
            if value != 0:
                self._entries[mask] = self._entries.get(mask, Fraction(0)) + value
                if self._entries[mask] == 0:
                    del self._entries[mask]

    @classmethod
    def from_masks(cls, n: int, entries: Mapping[int, Fraction]) -> "SetFunction":
        out = cls(n)
        out._entries = {m: v for m, v in entries.items() if v != 0}
        return out

    @classmethod
    def lift(cls, z: LevelVector, max_size: int | None = None) -> "SetFunction":
        """The symmetric set function with value ``z_|I|`` on every ``I`` (optionally only ``|I| <= max_size``)."""
        n = z.n
        top = n if max_size is None else min(max_size, n)
        entries = {}
        for mask in subset_masks(n, top):
            v = z[popcount(mask)]
            if v != 0:
                entries[mask] = v
        return cls.from_masks(n, entries)

    @classmethod
    def indicator(cls, n: int, subset: Iterable[int], value: RationalLike = 1) -> "SetFunction":
        return cls(n, {to_mask(subset, n): value})

    def __getitem__(self, subset) -> Fraction:
        mask = subset if isinstance(subset, int) else to_mask(subset, self.n)
        return self._entries.get(mask, Fraction(0))

    def masks(self) -> dict[int, Fraction]:
        return dict(self._entries)

    def items(self):
        for mask, v in self._entries.items():
            yield from_mask(mask), v

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.n == other.n and self._entries == other._entries

    def __repr__(self) -> str:
        return f"SetFunction(n={self.n}, support={len(self._entries)})"

    def total(self) -> Fraction:
        return sum(self._entries.values(), Fraction(0))

    def is_symmetric(self) -> bool:
        seen: dict[int, Fraction] = {}
        for mask, v in self._entries.items():
            k = popcount(mask)
            if seen.setdefault(k, v) != v:
                return False
        counts: dict[int, int] = {}
        for mask in self._entries:
            counts[popcount(mask)] = counts.get(popcount(mask), 0) + 1
        return all(c == binom(self.n, k) for k, c in counts.items())

    def to_levels(self) -> LevelVector:
        if not self.is_symmetric():
            raise ValueError("set function is not symmetric")
        vals = [Fraction(0)] * (self.n + 1)
        for mask, v in self._entries.items():
            vals[popcount(mask)] = v
        return LevelVector(self.n, tuple(vals))

    def to_json(self) -> dict:
        entries = sorted(self._entries.items(), key=lambda kv: (popcount(kv[0]), kv[0]))
        return {
            "n": self.n,
            "entries": [{"set": sorted(from_mask(m)), "value": format_rational(v)} for m, v in entries],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "SetFunction":
        n = int(obj["n"])
        return cls(n, [(tuple(e["set"]), to_rational(e["value"])) for e in obj["entries"]])


@dataclass(frozen=True)
class MomentMatrix:
    """Dense symmetric matrix indexed by ``P_q(N)`` in rank order."""

    n: int
    q: int
    data: Matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.data)

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.data[i][j]

    def entry(self, a: Iterable[int], b: Iterable[int]) -> Fraction:
        index = subset_index(self.n, self.q)
        return self.data[index[to_mask(a, self.n)]][index[to_mask(b, self.n)]]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "order": "subsets of {1..n} with |I| <= q, grouped by size ascending, colexicographic within a size",
            "index": [sorted(from_mask(m)) for m in subset_masks(self.n, self.q)],
            "data": [[format_rational(v) for v in row] for row in self.data],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "MomentMatrix":
        data = tuple(tuple(to_rational(v) for v in row) for row in obj["data"])
        return cls(int(obj["n"]), int(obj["q"]), data)


@dataclass(frozen=True)
class LinearConstraint:
    """``g(x) = sum_i coeffs[i-1] x_i + constant``, read as ``g(x) >= 0``."""

    coeffs: tuple[Fraction, ...]
    constant: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(to_rational(c) for c in self.coeffs))
        object.__setattr__(self, "constant", to_rational(self.constant))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def sum_at_least(cls, n: int, rhs: RationalLike, members: Iterable[int] | None = None) -> "LinearConstraint":
        """``sum_{j in members} x_j - rhs >= 0`` (all of N when members is None)."""
        chosen = set(range(1, n + 1)) if members is None else set(members)
        return cls(tuple(Fraction(1 if j in chosen else 0) for j in range(1, n + 1)), -to_rational(rhs))

    def evaluate(self, subset) -> Fraction:
        mask = subset if isinstance(subset, int) else to_mask(subset, self.n)
        total = self.constant
        i = 0
        while mask:
            if mask & 1:
                total += self.coeffs[i]
            mask >>= 1
            i += 1
        return total

    def is_symmetric(self) -> bool:
        return len(set(self.coeffs)) <= 1

    def level_values(self) -> tuple[Fraction, ...]:
        """``g_k = k g_1 + g_0`` for a symmetric constraint."""
        if not self.is_symmetric():
            raise ValueError("constraint is not symmetric (coefficients differ)")
        g1 = self.coeffs[0] if self.coeffs else Fraction(0)
        return tuple(k * g1 + self.constant for k in range(self.n + 1))


# ---------------------------------------------------------------------------
# builders


def zeta_vector(subset: Iterable[int] | int, n: int, q: int) -> tuple[int, ...]:
    mask = subset if isinstance(subset, int) else to_mask(subset, n)
    return tuple(1 if (j & ~mask) == 0 else 0 for j in subset_masks(n, q))


def _check_q(n: int, q: int) -> None:
    if not 0 <= q <= n:
        raise ValueError(f"need 0 <= q <= n, got q={q}, n={n}")


def union_level_sums(z: LevelVector, max_union: int) -> list[Fraction]:
    """``c[u] = sum_k z_k C(n-u, k-u)``: the moment of any set of size ``u``."""
    n = z.n
    return [
        sum((z[k] * binom(n - u, k - u) for k in range(u, n + 1) if z[k] != 0), Fraction(0))
        for u in range(max_union + 1)
    ]


def _from_union_values(n: int, q: int, value_of) -> MomentMatrix:
    masks = subset_masks(n, q)
    rows = []
    for a in masks:
        rows.append(tuple(value_of(a | b) for b in masks))
    return MomentMatrix(n, q, tuple(rows))


def matrix_from_levels(z: LevelVector, q: int) -> MomentMatrix:
    """``sum_k z_k sum_{|I|=k} Z_I Z_I^T`` over ``P_q(N)``, via the closed-form entry."""
    n = z.n
    _check_q(n, q)
    c = union_level_sums(z, min(2 * q, n))
    return _from_union_values(n, q, lambda u: c[popcount(u)])


def matrix_from_levels_rank_one(z: LevelVector, q: int) -> MomentMatrix:
    """Same matrix as :func:`matrix_from_levels`, summed rank-one term by rank-one term."""
    n = z.n
    _check_q(n, q)
    masks = subset_masks(n, q)
    dim = len(masks)
    acc = [[Fraction(0)] * dim for _ in range(dim)]
    for big in range(1 << n):
        v = z[popcount(big)]
        if v == 0:
            continue
        inside = [r for r, m in enumerate(masks) if m & ~big == 0]
        for i in inside:
            row = acc[i]
            for j in inside:
                row[j] += v
    return MomentMatrix(n, q, tuple(tuple(r) for r in acc))


def _submasks_up_to(mask: int, limit: int):
    bits = []
    m, i = mask, 0
    while m:
        if m & 1:
            bits.append(1 << i)
        m >>= 1
        i += 1
    # enumerate subsets of the bit list with at most `limit` elements
    stack = [(0, 0, 0)]
    while stack:
        start, cur, size = stack.pop()
        yield cur
        if size == limit:
            continue
        for idx in range(start, len(bits)):
            stack.append((idx + 1, cur | bits[idx], size + 1))


def standard_moments(w: SetFunction, max_size: int) -> dict[int, Fraction]:
    """Upward sums ``w_U = sum_{H >= U} w^N_H`` for every ``|U| <= max_size`` (sparse)."""
    acc: dict[int, Fraction] = {}
    for h, v in w.masks().items():
        for u in _submasks_up_to(h, max_size):
            acc[u] = acc.get(u, Fraction(0)) + v
    return acc


def matrix_from_setfn(w: SetFunction, q: int) -> MomentMatrix:
    """``sum_H w_H Z_H Z_H^T`` over ``P_q(N)``; entry ``(I, J)`` is the sum of ``w_H`` over ``H >= I u J``."""
    n = w.n
    _check_q(n, q)
    up = standard_moments(w, min(2 * q, n))
    zero = Fraction(0)
    return _from_union_values(n, q, lambda u: up.get(u, zero))


def matrix_from_marked_levels(values: Mapping[tuple[int, int], Fraction], n: int, marked: Iterable[int], q: int) -> MomentMatrix:
    """Moment matrix of the set function ``w^N_H = values[(|H|, |H & S|)]`` for a marked set ``S``.

    Such a set function is invariant under every permutation fixing ``S``; the
    entry at ``(A, B)`` then only depends on ``|A u B|`` and ``|(A u B) & S|``,
    which keeps the build polynomial in ``n`` (no enumeration of ``2^n`` subsets).
    """
    _check_q(n, q)
    s_mask = to_mask(marked, n)
    s = popcount(s_mask)
    cache: dict[tuple[int, int], Fraction] = {}

    def moment(u_mask: int) -> Fraction:
        u = popcount(u_mask)
        a = popcount(u_mask & s_mask)
        key = (u, a)
        if key not in cache:
            total = Fraction(0)
            for (k, m), v in values.items():
                if v == 0:
                    continue
                total += v * binom(s - a, m - a) * binom(n - s - (u - a), k - m - (u - a))
            cache[key] = total
        return cache[key]

    return _from_union_values(n, q, moment)


# ---------------------------------------------------------------------------
# change of basis


def basis_to_standard(w_n: SetFunction, max_size: int | None = None) -> SetFunction:
    """Upward zeta transform ``w_I = sum_{I <= H <= N} w^N_H``."""
    top = w_n.n if max_size is None else max_size
    return SetFunction.from_masks(w_n.n, standard_moments(w_n, top))


def standard_to_basis(w: SetFunction, t: int) -> SetFunction:
    """Inverse change of basis, truncated to ``|I u H| <= 2t``.

    ``w^N_I = sum_{H <= N \\ I, |I u H| <= 2t} (-1)^{|H|} w_{I u H}`` for ``|I| <= 2t``
    and ``w^N_I = 0`` above. Values of ``w`` on sets larger than ``2t`` are ignored.
    """
    n = w.n
    top = min(2 * t, n)
    known = {m: v for m, v in w.masks().items() if popcount(m) <= top}
    out: dict[int, Fraction] = {}
    # Moebius inversion restricted to the down-set P_top(N): push each known value
    # w_U to every I <= U with sign (-1)^{|U \ I|}.
    for u_mask, v in known.items():
        size_u = popcount(u_mask)
        for i_mask in _submasks_up_to(u_mask, size_u):
            sign = -1 if (size_u - popcount(i_mask)) % 2 else 1
            out[i_mask] = out.get(i_mask, Fraction(0)) + sign * v
    return SetFunction.from_masks(n, out)


def levels_standard_to_basis(y: Sequence[RationalLike], n: int, t: int) -> LevelVector:
    """Symmetric form of :func:`standard_to_basis`: ``y[k]`` is the standard value on sets of size ``k``."""
    top = min(2 * t, n)
    vals = [to_rational(v) for v in y]
    out = []
    for k in range(n + 1):
        if k > top:
            out.append(Fraction(0))
            continue
        out.append(sum(((-1) ** h * binom(n - k, h) * vals[k + h] for h in range(top - k + 1)), Fraction(0)))
    return LevelVector(n, tuple(out))


def levels_basis_to_standard(z: LevelVector) -> tuple[Fraction, ...]:
    return tuple(union_level_sums(z, z.n))


# ---------------------------------------------------------------------------
# constraints and objective


def shift_setfn(g: LinearConstraint, y_n: SetFunction) -> SetFunction:
    """``z^N_I = g(x_I) y^N_I``."""
    if g.n != y_n.n:
        raise ValueError("constraint and set function live on different ground sets")
    return SetFunction.from_masks(y_n.n, {m: g.evaluate(m) * v for m, v in y_n.masks().items()})


def shift_levels(g: LinearConstraint, y: LevelVector) -> LevelVector:
    if g.n != y.n:
        raise ValueError("constraint and level vector live on different ground sets")
    gk = g.level_values()
    return LevelVector(y.n, tuple(gk[k] * y[k] for k in range(y.n + 1)))


def objective(f_levels: Sequence[RationalLike], y: LevelVector) -> Fraction:
    """``sum_I f(x_I) y^N_I`` for a symmetric objective with value ``f_levels[k]`` on ``|I| = k``."""
    if len(f_levels) != y.n + 1:
        raise ValueError("objective levels must have length n + 1")
    return sum((binom(y.n, k) * to_rational(f) * y[k] for k, f in enumerate(f_levels)), Fraction(0))


def dumps(obj) -> str:
    return json.dumps(obj.to_json(), indent=1)
