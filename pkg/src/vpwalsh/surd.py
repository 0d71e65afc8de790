"""Exact arithmetic on finite sums  sum_d c_d * sqrt(d)  with rational c_d.

Radicands are canonicalized to their squarefree cores, so each value has a
unique representation; rational-coefficient combinations of sqrt of distinct
squarefree integers are linearly independent over Q, which makes equality a
coefficient check and guarantees that sign determination by interval
refinement terminates.  Comparisons never touch floating point: a single
surd against a rational reduces to an integer comparison of squares, and the
general case uses dyadic enclosures from math.isqrt at escalating precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import VpWalshError

__all__ = ["SurdSum", "squarefree_decompose"]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n >= 1 as s*s*d with d squarefree; returns (s, d)."""
    if n < 1:
        raise VpWalshError(f"radicand must be >= 1, got {n}")
    if n.bit_length() > 64:
        # trial division would not terminate in reasonable time; callers keep
        # radicands within the width bit budget
        raise VpWalshError(f"radicand too large to factor ({n.bit_length()} bits)")
    s, d = 1, 1
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            d *= p
    f = 41
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            s *= f
        if n % f == 0:
            n //= f
            d *= f
        f += 2
    return s, d * n


def _sqrt_bounds(d: int, prec: int) -> tuple[Fraction, Fraction]:
    """Dyadic enclosure lo <= sqrt(d) <= hi with hi - lo <= 2^-prec."""
    r = math.isqrt(d << (2 * prec))
    lo = Fraction(r, 1 << prec)
    if r * r == d << (2 * prec):
        return lo, lo
    return lo, Fraction(r + 1, 1 << prec)


@dataclass(frozen=True)
class SurdSum:
    """Immutable exact value sum_d terms[d] * sqrt(d), d squarefree."""

    terms: tuple[tuple[int, Fraction], ...]  # sorted by radicand, no zero coeffs

    @staticmethod
    def zero() -> "SurdSum":
        return SurdSum(())

    @staticmethod
    def rational(c) -> "SurdSum":
        return SurdSum._from_dict({1: Fraction(c)})

    @staticmethod
    def sqrt_of(n: int, coeff=1) -> "SurdSum":
        """coeff * sqrt(n) for integer n >= 1."""
        s, d = squarefree_decompose(n)
        return SurdSum._from_dict({d: Fraction(coeff) * s})

    @staticmethod
    def _from_dict(d: dict[int, Fraction]) -> "SurdSum":
        items = tuple(sorted((k, v) for k, v in d.items() if v != 0))
        return SurdSum(items)

    def _dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def __add__(self, other) -> "SurdSum":
        other = _coerce(other)
        d = self._dict()
        for k, v in other.terms:
            d[k] = d.get(k, Fraction(0)) + v
        return SurdSum._from_dict(d)

    def __neg__(self) -> "SurdSum":
        return SurdSum(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other) -> "SurdSum":
        return self + (-_coerce(other))

    def scaled(self, c) -> "SurdSum":
        c = Fraction(c)
        if c == 0:
            return SurdSum.zero()
        return SurdSum(tuple((k, v * c) for k, v in self.terms))

    def __mul__(self, other) -> "SurdSum":
        other = _coerce(other)
        d: dict[int, Fraction] = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                s, core = squarefree_decompose(k1 * k2)
                d[core] = d.get(core, Fraction(0)) + v1 * v2 * s
        return SurdSum._from_dict(d)

    def floor(self) -> int:
        """Exact floor of the value."""
        if self.is_rational():
            return math.floor(self.rational_value())
        prec = 32
        while prec <= 1 << 16:
            lo = hi = Fraction(0)
            for d, c in self.terms:
                slo, shi = _sqrt_bounds(d, prec)
                if c > 0:
                    lo += c * slo
                    hi += c * shi
                else:
                    lo += c * shi
                    hi += c * slo
            flo, fhi = math.floor(lo), math.floor(hi)
            if flo == fhi:
                return flo
            prec *= 2
        raise VpWalshError("floor exceeded precision cap")  # pragma: no cover

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(k == 1 for k, _ in self.terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise VpWalshError("value is irrational")
        return self.terms[0][1] if self.terms else Fraction(0)

    def sign(self) -> int:
        """Exact sign in {-1, 0, +1}."""
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            return 1 if self.terms[0][1] > 0 else -1
        if len(self.terms) == 2 and self.terms[0][0] == 1:
            # rational + c*sqrt(d): exact squared comparison
            r = self.terms[0][1]
            d, c = self.terms[1]
            lhs = c * c * d  # (c sqrt d)^2
            if c > 0:
                if r >= 0:
                    return 1
                return 1 if lhs > r * r else -1
            if r <= 0:
                return -1
            return -1 if lhs > r * r else 1
        prec = 32
        while prec <= 1 << 16:
            lo = hi = Fraction(0)
            for d, c in self.terms:
                if d == 1:
                    lo += c
                    hi += c
                    continue
                slo, shi = _sqrt_bounds(d, prec)
                if c > 0:
                    lo += c * slo
                    hi += c * shi
                else:
                    lo += c * shi
                    hi += c * slo
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
        raise VpWalshError("sign determination exceeded precision cap")  # pragma: no cover

    def abs(self) -> "SurdSum":
        return -self if self.sign() < 0 else self

    def compare(self, other) -> int:
        """Exact three-way comparison with a SurdSum, Fraction, or int."""
        return (self - _coerce(other)).sign()

    def __eq__(self, other) -> bool:
        if isinstance(other, (SurdSum, Rational)):
            return self.terms == _coerce(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    def __float__(self) -> float:
        return float(sum(float(c) * math.sqrt(d) for d, c in self.terms))

    def decimal(self, digits: int = 30) -> str:
        """Decimal rendering, truncated toward zero, exact to the last digit."""
        scale = 10**digits
        coeff_bits = max(
            (abs(c.numerator).bit_length() for _, c in self.terms), default=1
        )
        prec = 64 + 4 * digits + coeff_bits
        for _ in range(8):
            lo = hi = Fraction(0)
            for d, c in self.terms:
                slo, shi = _sqrt_bounds(d, prec)
                if c > 0:
                    lo += c * slo
                    hi += c * shi
                else:
                    lo += c * shi
                    hi += c * slo
            lo_i = math.floor(lo * scale)
            hi_i = math.floor(hi * scale)
            if lo_i == hi_i:
                neg = lo_i < 0
                q, r = divmod(abs(lo_i), scale)
                body = f"{q}.{r:0{digits}d}" if digits else str(q)
                return ("-" if neg else "") + body
            prec *= 2
        raise VpWalshError("decimal rendering needs more precision")  # pragma: no cover

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for d, c in self.terms:
            parts.append(str(c) if d == 1 else f"{c}*sqrt({d})")
        return " + ".join(parts)


def _coerce(v) -> SurdSum:
    if isinstance(v, SurdSum):
        return v
    if isinstance(v, Rational):
        return SurdSum.rational(Fraction(v))
    raise TypeError(f"cannot interpret {type(v).__name__} as SurdSum")
