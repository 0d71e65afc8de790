"""Exact bit-level arithmetic on nonnegative integers and dyadic points.

Everything here is integer arithmetic: points are dyadic rationals k/2^M,
kept as (numerator, resolution) pairs, and all operations are pure.
Integers are arbitrary precision throughout; divergence plans routinely
produce exponents far beyond 64 bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError

__all__ = [
    "DyadicPoint",
    "binary_digits",
    "top_bit",
    "dyadic_sum",
    "rademacher",
]


@dataclass(frozen=True)
class DyadicPoint:
    """A point x = numerator / 2**resolution in [0, 1).

    Two points are equal iff their fully reduced forms are equal, so
    DyadicPoint(1, 1) == DyadicPoint(2, 2).
    """

    numerator: int
    resolution: int

    def __post_init__(self):
        if self.resolution < 0:
            raise PreconditionError(f"resolution must be >= 0, got {self.resolution}")
        if not 0 <= self.numerator < (1 << self.resolution):
            raise PreconditionError(
                f"numerator {self.numerator} out of range for resolution {self.resolution}"
            )

    @classmethod
    def from_index(cls, index: int, resolution: int) -> "DyadicPoint":
        """Left endpoint of the index-th dyadic cell of length 2^-resolution."""
        return cls(index, resolution)

    def reduced(self) -> "DyadicPoint":
        num, res = self.numerator, self.resolution
        if num == 0:
            return DyadicPoint(0, 0)
        while num % 2 == 0 and res > 0:
            num //= 2
            res -= 1
        return DyadicPoint(num, res)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.resolution)

    def cell_index(self, resolution: int) -> int:
        """Index of the dyadic cell of length 2^-resolution containing the point."""
        if resolution >= self.resolution:
            return self.numerator << (resolution - self.resolution)
        return self.numerator >> (self.resolution - resolution)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicPoint):
            return NotImplemented
        a, b = self.reduced(), other.reduced()
        return a.numerator == b.numerator and a.resolution == b.resolution

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.numerator, r.resolution))

    def __str__(self) -> str:
        if self.numerator.bit_length() > 4000:
            return f"{hex(self.numerator)}/2^{self.resolution}"
        return f"{self.numerator}/2^{self.resolution}"


def binary_digits(n: int) -> tuple[int, ...]:
    """Binary digits of n, least significant first, trailing zeros omitted.

    binary_digits(0) == () and sum(d * 2**j for j, d in enumerate(digits)) == n.
    """
    if n < 0:
        raise PreconditionError(f"binary_digits requires n >= 0, got {n}")
    digits = []
    while n:
        digits.append(n & 1)
        n >>= 1
    return tuple(digits)


def top_bit(n: int) -> int:
    """Index of the highest set bit of n >= 1, i.e. floor(log2 n).

    Rejects n = 0: the top bit of zero is undefined here.
    """
    if n < 1:
        raise PreconditionError(f"top_bit requires n >= 1, got {n}")
    return n.bit_length() - 1


def dyadic_sum(n: int, m: int) -> int:
    """Digitwise modulo-2 sum of the binary expansions (bitwise XOR).

    Commutative and associative; every element is its own inverse.
    """
    if n < 0 or m < 0:
        raise PreconditionError("dyadic_sum requires nonnegative arguments")
    return n ^ m


def rademacher(j: int, x: DyadicPoint) -> int:
    """Rademacher square wave: the sign (-1)**floor(2^(j+1) x), in {-1, +1}.

    Constant on dyadic intervals of length 2^-(j+1).
    """
    if j < 0:
        raise PreconditionError(f"rademacher index must be >= 0, got {j}")
    # floor(2^(j+1) * num / 2^M) with exact shifts
    shift = j + 1 - x.resolution
    if shift >= 0:
        floor_val = x.numerator << shift
    else:
        floor_val = x.numerator >> -shift
    return -1 if floor_val & 1 else 1
