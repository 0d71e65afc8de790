"""Block polynomials with lattice spectra and their exact certificates.

A block polynomial with parameters (log_degree m, width w), 2w < m, is the
normalized sum of w * 2^w Walsh functions whose frequencies

    freq(v, j) = 2^(m-w) v + 2^(m-2w) (v XOR 2^j),   0 <= v < 2^w, 0 <= j < w,

live on the lattice of multiples of the stride B = 2^(m-2w) inside
[B, 2^m).  The polynomial is supported on the agreement set where the two
Rademacher digit blocks [m-2w, m-w) and [m-w, m) coincide, and every value
is an integer multiple of 1/sqrt(w): all arithmetic here is therefore done
on scaled integers (values pre-multiplied by sqrt(w)), so every certified
inequality is an integer comparison.

Certified facts, each checked by enumeration or integer arithmetic:
  (L1)   the L1 norm is at most 1 (sign-vector enumeration);
  (LINF) the sup norm is at most 2^w sqrt(w), attained;
  (SPEC) the spectrum is exactly the stated lattice set;
  (CUT)  every point has a partial-sum order, a multiple of B inside
         [2^(m-w), 2^m), where |S_order| >= sqrt(w)/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import DyadicPoint
from .errors import BudgetError, PreconditionError, VerificationError
from .surd import SurdSum
from .walsh import GridFunction, bit_reverse
from .windows import WindowSequence

__all__ = [
    "ScaledValue",
    "BlockPolynomial",
    "OrderWitness",
    "lattice_frequency",
    "build",
    "eval_pointwise",
    "in_agreement_set",
    "select_order",
    "scaled_partial_sum",
    "verify_certificate",
    "BlockCertificate",
    "window_collapse_check",
    "CollapseCheck",
]


@dataclass(frozen=True)
class ScaledValue:
    """The exact number numerator / sqrt(root)."""

    numerator: int
    root: int  # positive integer whose square root divides the value

    def to_surd(self) -> SurdSum:
        return SurdSum.sqrt_of(self.root, Fraction(self.numerator, self.root))

    def __float__(self) -> float:
        return self.numerator / math.sqrt(self.root)

    def abs_at_least_sqrt_multiple(self, num: int, den: int) -> bool:
        """Exact test |value| >= (num/den) * sqrt(root)."""
        return den * abs(self.numerator) >= num * self.root

    def __str__(self) -> str:
        return f"{self.numerator}/sqrt({self.root})"


@dataclass(frozen=True)
class BlockPolynomial:
    """Parameter pair for one block polynomial; carries no dense storage."""

    log_degree: int  # m: frequencies lie below 2^m
    width: int  # w: number of lattice digits; 2w < m

    def __post_init__(self):
        if self.width < 1:
            raise PreconditionError(f"width must be >= 1, got {self.width}")
        if 2 * self.width >= self.log_degree:
            raise PreconditionError(
                f"need 2*width < log_degree, got width={self.width}, log_degree={self.log_degree}"
            )

    @property
    def stride(self) -> int:
        """Block size B = 2^(m-2w); every frequency is a multiple of it."""
        return 1 << (self.log_degree - 2 * self.width)

    @property
    def term_count(self) -> int:
        return self.width << self.width

    def min_frequency(self) -> int:
        return self.stride  # attained at freq(0, 0)

    def max_frequency_bound(self) -> int:
        return 1 << self.log_degree

    def frequencies(self, max_width: int = 20) -> list[int]:
        """All width * 2^width frequencies, sorted.  Enumeration only."""
        if self.width > max_width:
            raise BudgetError(
                f"frequency list has {self.width}*2^{self.width} entries; width budget is {max_width}"
            )
        m, w = self.log_degree, self.width
        out = []
        for v in range(1 << w):
            hi = v << (m - w)
            for j in range(w):
                out.append(hi + ((v ^ (1 << j)) << (m - 2 * w)))
        out.sort()
        return out


def lattice_frequency(log_degree: int, width: int, v: int, j: int) -> int:
    """freq(v, j) = 2^(m-w) v + 2^(m-2w) (v XOR 2^j) with named precondition checks."""
    if 2 * width >= log_degree:
        raise PreconditionError(f"need 2*width < log_degree, got {width}, {log_degree}")
    if not 0 <= v < (1 << width):
        raise PreconditionError(f"v must lie in [0, 2^width), got {v}")
    if not 0 <= j < width:
        raise PreconditionError(f"j must lie in [0, width), got {j}")
    return (v << (log_degree - width)) + ((v ^ (1 << j)) << (log_degree - 2 * width))


def _block_signs(bp: BlockPolynomial, x: DyadicPoint) -> tuple[list[int], list[int]]:
    """Rademacher signs on the low block [m-2w, m-w) and high block [m-w, m).

    r_j(x) is the sign of bit (M-1-j) of the numerator, so both blocks sit in
    one 2w-bit chunk; a single shift extracts it even at huge resolutions.
    """
    m, w = bp.log_degree, bp.width
    M = x.resolution
    if M <= m - 2 * w:
        return [1] * w, [1] * w  # all needed digits are past the resolution
    chunk = x.numerator >> max(M - m, 0)
    if M < m:
        chunk <<= m - M
    chunk &= (1 << (2 * w)) - 1
    lo = [-1 if (chunk >> (2 * w - 1 - j)) & 1 else 1 for j in range(w)]
    hi = [-1 if (chunk >> (w - 1 - k)) & 1 else 1 for k in range(w)]
    return lo, hi


def in_agreement_set(bp: BlockPolynomial, x: DyadicPoint) -> bool:
    """True when the two Rademacher digit blocks of x agree at every offset."""
    lo, hi = _block_signs(bp, x)
    return all(a == b for a, b in zip(lo, hi))


def eval_pointwise(bp: BlockPolynomial, x: DyadicPoint) -> ScaledValue:
    """Exact value at x as a scaled integer, in O(width) time and O(1) space.

    Zero off the agreement set; on it, 2^w times the sum of the low-block
    Rademacher signs.
    """
    lo, hi = _block_signs(bp, x)
    if any(a != b for a, b in zip(lo, hi)):
        return ScaledValue(0, bp.width)
    return ScaledValue(sum(lo) << bp.width, bp.width)


def build(
    bp: BlockPolynomial, mode: str = "scaled", max_dense: int = 24
) -> GridFunction:
    """Dense grid function at resolution m.

    mode='scaled' gives exact integer values (the polynomial times sqrt(w));
    mode='float' divides by sqrt(w).  Dense construction is capped: beyond
    max_dense only eval_pointwise / select_order are available.
    """
    m, w = bp.log_degree, bp.width
    if m > max_dense:
        raise BudgetError(f"dense build at log_degree={m} exceeds max_dense={max_dense}")
    size = 1 << m
    idx = np.arange(size, dtype=np.int64)
    lo = [1 - 2 * ((idx >> (2 * w - 1 - j)) & 1) for j in range(w)]
    hi = [1 - 2 * ((idx >> (w - 1 - k)) & 1) for k in range(w)]
    on = np.ones(size, dtype=np.int64)
    for a, b in zip(lo, hi):
        on &= a == b
    t = np.zeros(size, dtype=np.int64)
    for a in lo:
        t += a
    q = (t * on) << w
    if mode == "scaled":
        return GridFunction.from_values([int(v) for v in q], "exact")
    if mode == "float":
        scale = 1.0 / math.sqrt(w)
        return GridFunction.from_values([float(v) * scale for v in q], "float")
    raise PreconditionError(f"unknown build mode {mode!r}")


def scaled_partial_sum(bp: BlockPolynomial, n: int, x: DyadicPoint, max_width: int = 20) -> ScaledValue:
    """sqrt(w) * S_n at x by literal enumeration of frequencies below n."""
    from .walsh import walsh_eval

    total = 0
    for mu in bp.frequencies(max_width):
        if mu >= n:
            break
        total += walsh_eval(mu, x)
    return ScaledValue(total, bp.width)


@dataclass(frozen=True)
class OrderWitness:
    """Per-point witness for the large-partial-sum property.

    order is a multiple of the stride in [2^(m-w), 2^m) with
    |S_order| >= sqrt(w)/4, chosen between the two candidate cuts
    order_lo = 2^(m-w) v and order_hi = order_lo + stride * v, where v is
    assembled from the bit set on which the dominant low-block sign occurs.
    """

    x: DyadicPoint
    sign: int
    agree_bits: frozenset[int]
    block_index: int
    order_lo: int
    order_hi: int
    order: int
    sum_lo: ScaledValue
    sum_hi: ScaledValue

    @property
    def sum_at_order(self) -> ScaledValue:
        return self.sum_lo if self.order == self.order_lo else self.sum_hi


def _char_prefix_sum(signs: list[int], u: int) -> int:
    """sum over v' < u of prod_k signs[k]^(bit k of v'), in O(len(signs))."""
    w = len(signs)
    first_minus = w
    for t, s in enumerate(signs):
        if s < 0:
            first_minus = t
            break
    total = 0
    suffix = 1  # prod_{t > k} signs[t]^(bit t of u), maintained downward
    for k in range(w - 1, -1, -1):
        if (u >> k) & 1:
            if k <= first_minus:
                total += suffix << k
            suffix *= signs[k]
    return total


def select_order(bp: BlockPolynomial, x: DyadicPoint) -> OrderWitness:
    """Construct the order witness at x in O(width) time.

    Partial sums at block boundaries factor through prefix character sums,
    so no frequency enumeration is needed; the witness S-values are exact
    scaled integers.  Preference goes to the lower cut when both qualify.
    """
    m, w = bp.log_degree, bp.width
    lo, hi = _block_signs(bp, x)
    s = [a * b for a, b in zip(hi, lo)]
    plus = sum(1 for a in lo if a > 0)
    sigma = 1 if 2 * plus >= w else -1
    bits = frozenset(j for j, a in enumerate(lo) if a == sigma)
    v = sum(1 << j for j in bits)
    n_agree = len(bits)
    if 2 * n_agree < w or v < 1:
        raise VerificationError(f"sign selection failed at {x}: {n_agree} of {w}")
    order_lo = v << (m - w)
    order_hi = order_lo + v * bp.stride
    t_sum = sum(lo)
    q_lo = t_sum * _char_prefix_sum(s, v)
    c = 1
    for k in bits:
        c *= s[k]
    q_hi = q_lo + c * sigma * n_agree
    if abs(q_hi - q_lo) != n_agree:  # pragma: no cover - identity by construction
        raise VerificationError(f"cut difference identity failed at {x}")
    sv_lo = ScaledValue(q_lo, w)
    sv_hi = ScaledValue(q_hi, w)
    if sv_lo.abs_at_least_sqrt_multiple(1, 4):
        order = order_lo
    elif sv_hi.abs_at_least_sqrt_multiple(1, 4):
        order = order_hi
    else:
        raise VerificationError(
            f"internal contradiction: neither cut is large at {x} "
            f"(q_lo={q_lo}, q_hi={q_hi}, width={w})"
        )
    return OrderWitness(x, sigma, bits, v, order_lo, order_hi, order, sv_lo, sv_hi)


@dataclass
class BlockCertificate:
    """Machine-checked record of the four certified facts for one (m, w)."""

    log_degree: int
    width: int
    passed: bool
    l1_sign_enum: int  # sum over sign vectors of |component sum|
    l1_norm_sq: Fraction  # exact squared L1 norm
    l1_bound_ok: bool
    l1_grid_matches_enum: bool
    linf_scaled_max: int
    linf_bound_ok: bool
    linf_attained: bool
    spectrum_size: int
    spectrum_distinct: bool
    spectrum_on_lattice: bool
    spectrum_min: int
    spectrum_max: int
    spectrum_range_ok: bool
    dense_matches_factorized: bool
    cut_points_checked: int
    cut_all_large: bool
    cut_min_scaled_abs: int
    cut_difference_identity_ok: bool
    failures: list

    def to_json_obj(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            if isinstance(v, Fraction):
                out[k] = str(v)
            elif isinstance(v, (bool, int, str, list)):
                out[k] = v
            else:
                out[k] = str(v)
        return out


def verify_certificate(bp: BlockPolynomial, max_dense: int = 24) -> BlockCertificate:
    """Check all four certified facts integer-exactly at every grid cell.

    The cut fact is verified through literal frequency enumeration (an
    independent route from the character-sum selector used by select_order).
    """
    m, w = bp.log_degree, bp.width
    if m > max_dense:
        raise BudgetError(f"certificate at log_degree={m} exceeds max_dense={max_dense}")
    size = 1 << m
    stride = bp.stride
    failures: list = []

    idx = np.arange(size, dtype=np.int64)
    lo = [1 - 2 * ((idx >> (2 * w - 1 - j)) & 1) for j in range(w)]
    hi = [1 - 2 * ((idx >> (w - 1 - k)) & 1) for k in range(w)]
    on = np.ones(size, dtype=np.int64)
    for a, b in zip(lo, hi):
        on &= a == b
    t = np.zeros(size, dtype=np.int64)
    for a in lo:
        t += a
    q = (t * on) << w  # scaled dense values

    # (SPEC) exact frequency set facts
    freqs = bp.frequencies()
    mu = np.array(freqs, dtype=np.int64)
    spectrum_distinct = len(set(freqs)) == bp.term_count
    spectrum_on_lattice = bool(np.all(mu % stride == 0))
    spectrum_min = int(mu.min())
    spectrum_max = int(mu.max())
    spectrum_range_ok = spectrum_min == stride and spectrum_max < (1 << m)

    # dense synthesis from the frequency list must match the factorized values
    rev = np.array([bit_reverse(i, m) for i in range(size)], dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(mu[:, None] & rev[None, :]).astype(np.int64) & 1)
    synth = signs.sum(axis=0)
    dense_matches = bool(np.array_equal(synth, q))
    if not dense_matches:
        bad = int(np.nonzero(synth != q)[0][0])
        failures.append({"check": "dense", "cell": bad})

    # (L1) sign-vector enumeration against the grid sum
    x_enum = sum(math.comb(w, i) * abs(w - 2 * i) for i in range(w + 1))
    grid_abs_sum = int(np.abs(q).sum())
    l1_grid_matches_enum = grid_abs_sum == (x_enum << (m - w))
    l1_norm_sq = Fraction(x_enum * x_enum, (1 << (2 * w)) * w)
    l1_bound_ok = x_enum * x_enum <= (1 << (2 * w)) * w
    if not (l1_grid_matches_enum and l1_bound_ok):
        failures.append({"check": "l1", "sign_enum": x_enum, "grid_sum": grid_abs_sum})

    # (LINF)
    linf_scaled_max = int(np.abs(q).max())
    linf_bound_ok = linf_scaled_max <= (w << w)
    linf_attained = linf_scaled_max == (w << w)
    if not linf_bound_ok:
        failures.append({"check": "linf", "max": linf_scaled_max})

    # (CUT) witness at every cell, S-values by frequency enumeration
    plus = np.zeros(size, dtype=np.int64)
    for a in lo:
        plus += a > 0
    sigma = np.where(2 * plus >= w, 1, -1).astype(np.int64)
    v = np.zeros(size, dtype=np.int64)
    n_agree = np.zeros(size, dtype=np.int64)
    for j, a in enumerate(lo):
        match = (a == sigma).astype(np.int64)
        v += match << j
        n_agree += match
    order_lo = v << (m - w)
    order_hi = order_lo + v * stride
    cums = np.vstack([np.zeros(size, dtype=np.int64), np.cumsum(signs, axis=0)])
    s1 = np.take_along_axis(cums, np.searchsorted(mu, order_lo)[None, :], axis=0)[0]
    s2 = np.take_along_axis(cums, np.searchsorted(mu, order_hi)[None, :], axis=0)[0]
    diff_ok = bool(np.array_equal(np.abs(s2 - s1), n_agree))
    lo_large = 4 * np.abs(s1) >= w
    chosen = np.where(lo_large, s1, s2)
    cut_ok_mask = 4 * np.abs(chosen) >= w
    cut_all_large = bool(cut_ok_mask.all())
    structural_ok = bool(
        np.all(order_lo >= (1 << (m - w)))
        and np.all(order_hi < (1 << m))
        and np.all(order_lo % stride == 0)
        and np.all(order_hi % stride == 0)
        and np.all(2 * n_agree >= w)
    )
    if not (diff_ok and cut_all_large and structural_ok):
        bad_cells = np.nonzero(~cut_ok_mask)[0][:8]
        failures.append({"check": "cut", "cells": [int(b) for b in bad_cells]})
    cut_min = int(np.abs(chosen).min())

    passed = not failures
    return BlockCertificate(
        log_degree=m,
        width=w,
        passed=passed,
        l1_sign_enum=x_enum,
        l1_norm_sq=l1_norm_sq,
        l1_bound_ok=l1_bound_ok,
        l1_grid_matches_enum=l1_grid_matches_enum,
        linf_scaled_max=linf_scaled_max,
        linf_bound_ok=linf_bound_ok,
        linf_attained=linf_attained,
        spectrum_size=len(freqs),
        spectrum_distinct=spectrum_distinct,
        spectrum_on_lattice=spectrum_on_lattice,
        spectrum_min=spectrum_min,
        spectrum_max=spectrum_max,
        spectrum_range_ok=spectrum_range_ok,
        dense_matches_factorized=dense_matches,
        cut_points_checked=size,
        cut_all_large=cut_all_large,
        cut_min_scaled_abs=cut_min,
        cut_difference_identity_ok=diff_ok,
        failures=failures,
    )


@dataclass(frozen=True)
class CollapseCheck:
    """Record that the VP mean at the witness order equals the bare partial sum."""

    order: int
    window_value: int
    stride: int
    sum_scaled: ScaledValue
    equal: bool
    direct_terms_checked: int


def window_collapse_check(
    bp: BlockPolynomial,
    window: WindowSequence,
    x: DyadicPoint,
    direct_budget: int = 1 << 12,
) -> CollapseCheck:
    """Verify V_order = S_order exactly when the window fits inside one block.

    Requires lambda_order < stride; since the order is a multiple of the
    stride and every frequency is one too, no frequency falls strictly
    inside the averaging window, so each partial sum in it equals S_order.
    When budgets allow, the partial sums in the window are also enumerated
    literally and compared term by term.
    """
    witness = select_order(bp, x)
    order = witness.order
    lam = window.value(order)
    stride = bp.stride
    if lam >= stride:
        raise PreconditionError(
            f"window value lambda={lam} at order {order} must be below the stride {stride}"
        )
    q = witness.sum_at_order
    direct_terms = 0
    if bp.width <= 16 and (lam + 1) * bp.term_count <= direct_budget * 64:
        total = 0
        for k in range(order - lam, order + 1):
            sk = scaled_partial_sum(bp, k, x)
            if sk.numerator != q.numerator:
                raise VerificationError(
                    f"window term S_{k} = {sk} differs from S_order = {q} at {x}"
                )
            total += sk.numerator
            direct_terms += 1
        if total != (lam + 1) * q.numerator:  # pragma: no cover
            raise VerificationError("window average mismatch")
    return CollapseCheck(order, lam, stride, q, True, direct_terms)
