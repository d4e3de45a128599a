"""Univariate polynomials over Q in the monomial basis, with Sturm root counting."""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .arith import RationalLike, format_rational, to_rational


class PolynomialQ:
    """Immutable polynomial with exact rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [to_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c: RationalLike) -> "PolynomialQ":
        return cls((c,))

    @classmethod
    def x(cls) -> "PolynomialQ":
        return cls((0, 1))

    @classmethod
    def linear(cls, slope: RationalLike, offset: RationalLike) -> "PolynomialQ":
        return cls((offset, slope))

    @classmethod
    def falling(cls, shift: RationalLike, m: int, sign: int = 1) -> "PolynomialQ":
        """``(sign*x + shift)`` falling factorial of order ``m`` as a polynomial in ``x``."""
        out = cls.constant(1)
        shift = to_rational(shift)
        for i in range(m):
            out = out * cls((shift - i, sign))
        return out

    @classmethod
    def newton_binom(cls, shift: RationalLike, m: int) -> "PolynomialQ":
        """``binom(x + shift, m)`` as a polynomial in ``x``."""
        return cls.falling(shift, m).scale(Fraction(1, factorial(m)))

    @property
    def degree(self) -> int:
        """Exact degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x: RationalLike) -> Fraction:
        x = to_rational(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, PolynomialQ):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"PolynomialQ([{', '.join(format_rational(c) for c in self.coeffs)}])"

    def __add__(self, other: "PolynomialQ") -> "PolynomialQ":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return PolynomialQ(out)

    def __neg__(self) -> "PolynomialQ":
        return PolynomialQ(-c for c in self.coeffs)

    def __sub__(self, other: "PolynomialQ") -> "PolynomialQ":
        return self + (-other)

    def __mul__(self, other) -> "PolynomialQ":
        if not isinstance(other, PolynomialQ):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return PolynomialQ()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return PolynomialQ(out)

    __rmul__ = __mul__

    def scale(self, c: RationalLike) -> "PolynomialQ":
        c = to_rational(c)
        return PolynomialQ(c * x for x in self.coeffs)

    def __pow__(self, e: int) -> "PolynomialQ":
        out = PolynomialQ.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def derivative(self) -> "PolynomialQ":
        return PolynomialQ(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def divmod(self, other: "PolynomialQ") -> tuple["PolynomialQ", "PolynomialQ"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading()
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for shift in range(len(rem) - 1 - dq, -1, -1):
            c = rem[shift + dq] / lead
            quot[shift] = c
            if c:
                for i, oc in enumerate(other.coeffs):
                    rem[shift + i] -= c * oc
        return PolynomialQ(quot), PolynomialQ(rem[:dq] if dq > 0 else [])

    def monic(self) -> "PolynomialQ":
        return self.scale(1 / self.leading()) if self.coeffs else self


def poly_gcd(a: PolynomialQ, b: PolynomialQ) -> PolynomialQ:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def squarefree_decomposition(p: PolynomialQ) -> list[PolynomialQ]:
    """Yun's algorithm: ``[f1, f2, ...]`` with ``p = c * prod f_i^i``, each ``f_i`` squarefree and monic."""
    if p.degree < 1:
        return []
    out = []
    a = poly_gcd(p, p.derivative())
    b = p.divmod(a)[0]
    c = p.derivative().divmod(a)[0]
    d = c - b.derivative()
    while b.degree >= 1:
        f = poly_gcd(b, d)
        out.append(f)
        b = b.divmod(f)[0]
        c = d.divmod(f)[0]
        d = c - b.derivative()
    while out and out[-1].degree < 1:
        out.pop()
    return out


def odd_multiplicity_part(p: PolynomialQ) -> PolynomialQ:
    """Product of the distinct roots of ``p`` that have odd multiplicity (monic; 1 if none)."""
    out = PolynomialQ.constant(1)
    for i, f in enumerate(squarefree_decomposition(p), start=1):
        if i % 2 == 1:
            out = out * f
    return out


def sturm_sequence(p: PolynomialQ) -> list[PolynomialQ]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2].divmod(seq[-1])[1]))
    seq.pop()
    return seq


def _sign_changes(values: Sequence[Fraction]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_open(p: PolynomialQ, a: RationalLike, b: RationalLike, seq: list[PolynomialQ] | None = None) -> int:
    """Number of distinct real roots of ``p`` strictly inside ``(a, b)``.

    A precomputed ``seq`` must be the Sturm sequence of a squarefree ``p``.
    """
    a, b = to_rational(a), to_rational(b)
    if a >= b or p.degree < 1:
        return 0
    if seq is None:
        # a multiple root at an endpoint zeroes the whole sequence there; use the squarefree part
        p = p.divmod(poly_gcd(p, p.derivative()))[0]
        seq = sturm_sequence(p)
    # V(a) - V(b) counts distinct roots in (a, b]
    count = _sign_changes([q(a) for q in seq]) - _sign_changes([q(b) for q in seq])
    if p(b) == 0:
        count -= 1
    return count
