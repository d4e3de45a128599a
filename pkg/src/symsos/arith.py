"""Exact rational scalars, binomials and the ranked order on small subsets.

Subsets of ``N = {1..n}`` are handled in two forms: as ``frozenset`` objects at
the public surface and as bitmasks (bit ``i-1`` set iff ``i`` is in the set)
inside the matrix builders.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Union

RationalLike = Union[Fraction, int, str]


def to_rational(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if not s:
        raise ValueError("empty rational string")
    if "." in s or "e" in s.lower():
        raise ValueError(f"decimal notation is not accepted for exact values: {s!r}")
    return Fraction(s)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def binom(n: int, k: int) -> int:
    """C(n, k) for n >= 0, and 0 whenever k is out of range."""
    if n < 0:
        raise ValueError("binom requires n >= 0")
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def falling_factorial(x: RationalLike, m: int) -> Fraction:
    if m < 0:
        raise ValueError("falling_factorial requires m >= 0")
    x = to_rational(x)
    out = Fraction(1)
    for i in range(m):
        out *= x - i
    return out


def generalized_binom(x: RationalLike, m: int) -> Fraction:
    """x(x-1)...(x-m+1)/m! for any rational x."""
    if m < 0:
        raise ValueError("generalized_binom requires m >= 0")
    return falling_factorial(x, m) / factorial(m)


def poly_binom(x: int, m: int) -> int:
    """Binomial as the polynomial x(x-1).../m! evaluated at an integer (x may be negative); 0 for m < 0."""
    if m < 0:
        return 0
    if x >= 0:
        return binom(x, m)
    # C(x, m) = (-1)^m C(m - x - 1, m)
    return (-1) ** m * comb(m - x - 1, m)


# ---------------------------------------------------------------------------
# subsets


def to_mask(subset: Iterable[int], n: int) -> int:
    mask = 0
    for i in subset:
        if not 1 <= i <= n:
            raise ValueError(f"element {i} is outside N = {{1..{n}}}")
        mask |= 1 << (i - 1)
    return mask


def from_mask(mask: int) -> frozenset[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def num_subsets(n: int, q: int) -> int:
    """|P_q(N)|, the number of subsets of size at most q."""
    return sum(binom(n, i) for i in range(q + 1))


def _colex_of_size(n: int, k: int) -> list[int]:
    # colex: compare by largest element first; Gosper's hack enumerates masks in increasing
    # integer order, which for fixed popcount is exactly colex.
    if k == 0:
        return [0]
    if k > n:
        return []
    out = []
    v = (1 << k) - 1
    limit = 1 << n
    while v < limit:
        out.append(v)
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r
    return out


@lru_cache(maxsize=256)
def subset_masks(n: int, q: int) -> tuple[int, ...]:
    """All subsets of size <= q as bitmasks, in rank order (size ascending, colex within size)."""
    if n < 0 or q < 0:
        raise ValueError("n and q must be non-negative")
    q = min(q, n)
    out: list[int] = []
    for k in range(q + 1):
        out.extend(_colex_of_size(n, k))
    return tuple(out)


@lru_cache(maxsize=256)
def subset_index(n: int, q: int) -> dict[int, int]:
    return {m: r for r, m in enumerate(subset_masks(n, q))}


def subset_rank(subset: Iterable[int], n: int, q: int) -> int:
    elems = sorted(set(subset))
    if len(elems) > q:
        raise ValueError(f"subset of size {len(elems)} exceeds q = {q}")
    if q > n:
        raise ValueError("q must not exceed n")
    to_mask(elems, n)
    rank = sum(binom(n, i) for i in range(len(elems)))
    for pos, e in enumerate(elems):
        rank += binom(e - 1, pos + 1)
    return rank


def subset_unrank(rank: int, n: int, q: int) -> frozenset[int]:
    masks = subset_masks(n, q)
    if not 0 <= rank < len(masks):
        raise ValueError(f"rank {rank} out of range for P_{q}({n})")
    return from_mask(masks[rank])
