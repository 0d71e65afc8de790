"""Walsh-Paley transforms and partial sums on dyadic grid functions.

A GridFunction at resolution M is a step function on [0,1) with 2^M cells,
which is the same thing as a Walsh polynomial of degree < 2^M.  Every
integral below is therefore exact quadrature, and in exact mode all
arithmetic is over Fractions.  Coefficients are always indexed in Paley
order (the w_n order); Hadamard and sequency orders exist only as explicit
reorderings.

The fast transform runs in O(M 2^M) butterfly operations.  In floating
mode equality checks use relative tolerance 1e-12, derived aggregates
(norms, means) 1e-9; butterflies accumulate at most ~M rounding steps.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Literal, Sequence

import numpy as np

from .dyadic import DyadicPoint, rademacher
from .errors import BudgetError, PreconditionError

__all__ = [
    "TOL_EQ",
    "TOL_AGG",
    "GridFunction",
    "SpectrumVector",
    "walsh_eval",
    "walsh_eval_at_cell",
    "forward_fwht",
    "inverse_fwht",
    "partial_sum",
    "partial_sum_with_flag",
    "partial_sum_direct",
    "partial_sum_all",
    "spectrum",
    "paley_to_hadamard",
    "paley_to_sequency",
    "bit_reverse",
    "random_grid",
]

TOL_EQ = 1e-12  # relative tolerance for floating-mode equality
TOL_AGG = 1e-9  # relative tolerance for floating-mode aggregates

Mode = Literal["exact", "float"]

_REV_CACHE: dict[int, list[int]] = {}


def bit_reverse(i: int, width: int) -> int:
    """Reverse the low `width` bits of i."""
    out = 0
    for _ in range(width):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


def _rev_table(width: int) -> list[int]:
    tbl = _REV_CACHE.get(width)
    if tbl is None:
        tbl = _rev_array(width).tolist()
        _REV_CACHE[width] = tbl
    return tbl


_REV_ARRAY_CACHE: dict[int, np.ndarray] = {}


def _rev_array(width: int) -> np.ndarray:
    arr = _REV_ARRAY_CACHE.get(width)
    if arr is None:
        idx = np.arange(1 << width, dtype=np.int64)
        arr = np.zeros_like(idx)
        for b in range(width):
            arr |= ((idx >> b) & 1) << (width - 1 - b)
        _REV_ARRAY_CACHE[width] = arr
    return arr


def _check_mode_value(mode: Mode, v):
    if mode == "exact":
        if not isinstance(v, Rational):
            raise PreconditionError(f"exact mode requires rational values, got {type(v).__name__}")
    elif not isinstance(v, (float, int)):
        raise PreconditionError(f"float mode requires numeric values, got {type(v).__name__}")


@dataclass(frozen=True)
class GridFunction:
    """Step function on [0,1), constant on cells [k/2^M, (k+1)/2^M)."""

    resolution: int
    values: tuple
    mode: Mode = "exact"

    def __post_init__(self):
        if self.resolution < 0:
            raise PreconditionError("resolution must be >= 0")
        if len(self.values) != 1 << self.resolution:
            raise PreconditionError(
                f"expected {1 << self.resolution} values, got {len(self.values)}"
            )

    @classmethod
    def from_values(cls, values: Sequence, mode: Mode = "exact") -> "GridFunction":
        n = len(values)
        if n == 0 or n & (n - 1):
            raise PreconditionError(f"value count must be a power of two, got {n}")
        for v in values:
            _check_mode_value(mode, v)
        if mode == "exact":
            values = [Fraction(v) for v in values]
        else:
            values = [float(v) for v in values]
        return cls(n.bit_length() - 1, tuple(values), mode)

    @classmethod
    def constant(cls, value, resolution: int, mode: Mode = "exact") -> "GridFunction":
        return cls.from_values([value] * (1 << resolution), mode)

    def value_at(self, x: DyadicPoint):
        return self.values[x.cell_index(self.resolution)]

    def norm_l1(self):
        s = sum(abs(v) for v in self.values)
        return s / (1 << self.resolution) if self.mode == "float" else Fraction(s, 1 << self.resolution)

    def norm_l2_sq(self):
        s = sum(v * v for v in self.values)
        return s / (1 << self.resolution) if self.mode == "float" else Fraction(s, 1 << self.resolution)

    def norm_linf(self):
        return max(abs(v) for v in self.values)

    def to_json_obj(self) -> dict:
        return {
            "kind": "grid",
            "resolution": self.resolution,
            "mode": self.mode,
            "values": [_num_to_str(v, self.mode) for v in self.values],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GridFunction":
        mode = obj.get("mode", "exact")
        vals = [_num_from_str(s, mode) for s in obj["values"]]
        g = cls.from_values(vals, mode)
        if g.resolution != obj["resolution"]:
            raise PreconditionError("resolution field disagrees with value count")
        return g

    def to_csv(self) -> str:
        lines = ["index,value"]
        lines += [f"{i},{_num_to_str(v, self.mode)}" for i, v in enumerate(self.values)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, mode: Mode = "exact") -> "GridFunction":
        rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        vals = [_num_from_str(ln.split(",")[1], mode) for ln in rows[1:]]
        return cls.from_values(vals, mode)


@dataclass(frozen=True)
class SpectrumVector:
    """Walsh coefficients in Paley order: coeffs[k] is the weight of w_k."""

    resolution: int
    coeffs: tuple
    mode: Mode = "exact"

    def __post_init__(self):
        if len(self.coeffs) != 1 << self.resolution:
            raise PreconditionError(
                f"expected {1 << self.resolution} coefficients, got {len(self.coeffs)}"
            )

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, mode: Mode = "exact") -> "SpectrumVector":
        g = GridFunction.from_values(coeffs, mode)
        return cls(g.resolution, g.values, mode)

    def to_json_obj(self) -> dict:
        return {
            "kind": "spectrum",
            "resolution": self.resolution,
            "mode": self.mode,
            "values": [_num_to_str(v, self.mode) for v in self.coeffs],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SpectrumVector":
        mode = obj.get("mode", "exact")
        vals = [_num_from_str(s, mode) for s in obj["values"]]
        return cls.from_coeffs(vals, mode)

    def to_csv(self) -> str:
        lines = ["index,value"]
        lines += [f"{i},{_num_to_str(v, self.mode)}" for i, v in enumerate(self.coeffs)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, mode: Mode = "exact") -> "SpectrumVector":
        g = GridFunction.from_csv(text, mode)
        return cls(g.resolution, g.values, mode)


def _num_to_str(v, mode: Mode) -> str:
    if mode == "exact":
        return str(Fraction(v))
    return repr(float(v))


def _num_from_str(s: str, mode: Mode):
    return Fraction(s) if mode == "exact" else float(s)


def walsh_eval(n: int, x: DyadicPoint) -> int:
    """Walsh-Paley function w_n at x: the product of rademacher(j, x) over set bits of n."""
    if n < 0:
        raise PreconditionError(f"walsh index must be >= 0, got {n}")
    sign = 1
    j = 0
    while n:
        if n & 1 and rademacher(j, x) < 0:
            sign = -sign
        n >>= 1
        j += 1
    return sign


def walsh_eval_at_cell(n: int, i: int, resolution: int) -> int:
    """w_n at the cell i/2^M, via the parity of popcount(n & bitrev(i))."""
    return -1 if (n & bit_reverse(i, resolution)).bit_count() & 1 else 1


def _hadamard_inplace_list(a: list) -> None:
    """In-place natural-order transform: a[k] <- sum_b (-1)^<k,b> a[b]."""
    n = len(a)
    h = 1
    while h < n:
        for base in range(0, n, 2 * h):
            for j in range(base, base + h):
                x, y = a[j], a[j + h]
                a[j] = x + y
                a[j + h] = x - y
        h *= 2


def _hadamard_numpy(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    h = 1
    while h < n:
        b = a.reshape(-1, 2, h)
        x = b[:, 0, :].copy()
        y = b[:, 1, :]
        b[:, 0, :] = x + y
        b[:, 1, :] = x - y
        h *= 2
        a = b.reshape(-1)
    return a


def forward_fwht(f: GridFunction) -> SpectrumVector:
    """Walsh coefficients of f, exact quadrature at resolution M, Paley order."""
    M = f.resolution
    if f.mode == "float":
        buf = np.asarray(f.values, dtype=np.float64)[_rev_array(M)]
        out = _hadamard_numpy(buf) / (1 << M)
        return SpectrumVector(M, tuple(out.tolist()), "float")
    rev = _rev_table(M)
    buf = [f.values[rev[b]] for b in range(1 << M)]
    _hadamard_inplace_list(buf)
    scale = Fraction(1, 1 << M)
    return SpectrumVector(M, tuple(v * scale for v in buf), "exact")


def inverse_fwht(c: SpectrumVector) -> GridFunction:
    """Synthesize the grid function with the given Paley coefficients."""
    M = c.resolution
    if c.mode == "float":
        buf = np.asarray(c.coeffs, dtype=np.float64).copy()
        out = _hadamard_numpy(buf)[_rev_array(M)]
        return GridFunction(M, tuple(out.tolist()), "float")
    rev = _rev_table(M)
    buf = list(c.coeffs)
    _hadamard_inplace_list(buf)
    return GridFunction(M, tuple(Fraction(buf[rev[i]]) for i in range(1 << M)), "exact")


def partial_sum_with_flag(f: GridFunction, n: int, x: DyadicPoint):
    """Truncated Walsh series at x: sum over k < n of coeff(k) w_k(x).

    Returns (value, clamped).  Orders beyond 2^M add nothing because the
    coefficients vanish there, so n > 2^M yields f(x) with clamped=True.
    """
    if n < 0:
        raise PreconditionError(f"partial sum order must be >= 0, got {n}")
    M = f.resolution
    clamped = n > (1 << M)
    if clamped:
        n = 1 << M
    zero = Fraction(0) if f.mode == "exact" else 0.0
    total = zero
    vals = f.values
    k = 0
    rem = n
    while rem:
        if rem & 1:
            hi = n >> (k + 1) << (k + 1)  # bits of n above position k
            cell_lo = x.cell_index(k) << (M - k)
            width = 1 << (M - k)
            acc = zero
            for i in range(cell_lo, cell_lo + width):
                w = walsh_eval_at_cell(hi, i, M)
                acc = acc + vals[i] if w > 0 else acc - vals[i]
            term = acc / width if f.mode == "float" else Fraction(acc, width)
            if walsh_eval(hi, x) < 0:
                term = -term
            total = total + term
        rem >>= 1
        k += 1
    return total, clamped


def partial_sum(f: GridFunction, n: int, x: DyadicPoint):
    """partial_sum_with_flag without the clamp flag."""
    return partial_sum_with_flag(f, n, x)[0]


def partial_sum_direct(f: GridFunction, n: int, x: DyadicPoint):
    """Reference path: transform then literal O(n) summation of coeff(k) w_k(x)."""
    c = forward_fwht(f)
    n = min(n, 1 << f.resolution)
    zero = Fraction(0) if f.mode == "exact" else 0.0
    total = zero
    for k in range(n):
        ck = c.coeffs[k]
        if ck:
            total += ck * walsh_eval(k, x)
    return total


def _rademacher_row(j: int, M: int, float_mode: bool):
    n = 1 << M
    shift = M - 1 - j
    if float_mode:
        idx = np.arange(n, dtype=np.int64)
        return 1.0 - 2.0 * ((idx >> shift) & 1)
    return [(-1 if (i >> shift) & 1 else 1) for i in range(n)]


def partial_sum_all(
    f: GridFunction,
    n_max: int | None = None,
    strategy: Literal["incremental", "transform"] = "incremental",
    max_resolution: int = 12,
):
    """Matrix S[n][i] of partial sums for 0 <= n <= n_max at every grid cell.

    'incremental' extends row n to n+1 with one coefficient (O(4^M) scalar
    updates total); 'transform' synthesizes each row by an inverse transform
    of the truncated coefficients (O(M 4^M)).  Both agree exactly in exact
    mode and within 1e-12 in floating mode.
    """
    M = f.resolution
    if M > max_resolution:
        raise BudgetError(
            f"partial_sum_all at resolution M={M} exceeds the budget max_resolution={max_resolution}"
        )
    size = 1 << M
    if n_max is None:
        n_max = size
    if not 0 <= n_max <= size:
        raise PreconditionError(f"n_max must lie in [0, 2^M]; got {n_max}")
    coeffs = forward_fwht(f)
    if strategy == "transform":
        rows = []
        for n in range(n_max + 1):
            if f.mode == "float":
                trunc = list(coeffs.coeffs[:n]) + [0.0] * (size - n)
            else:
                trunc = list(coeffs.coeffs[:n]) + [Fraction(0)] * (size - n)
            row = inverse_fwht(SpectrumVector(M, tuple(trunc), f.mode)).values
            rows.append(np.asarray(row, dtype=np.float64) if f.mode == "float" else list(row))
        return rows
    if strategy != "incremental":
        raise PreconditionError(f"unknown strategy {strategy!r}")
    if f.mode == "float":
        rad = [_rademacher_row(j, M, True) for j in range(M)]
        w = np.ones(size, dtype=np.float64)
        s = np.zeros(size, dtype=np.float64)
        rows = [s]
        for n in range(n_max):
            if n:
                flips = (n - 1) ^ n
                j = 0
                while flips:
                    if flips & 1:
                        w = w * rad[j]
                    flips >>= 1
                    j += 1
            s = s + coeffs.coeffs[n] * w
            rows.append(s)
        return rows
    rad = [_rademacher_row(j, M, False) for j in range(M)]
    w = [1] * size
    s = [Fraction(0)] * size
    rows = [list(s)]
    for n in range(n_max):
        if n:
            flips = (n - 1) ^ n
            j = 0
            while flips:
                if flips & 1:
                    rj = rad[j]
                    w = [a * b for a, b in zip(w, rj)]
                flips >>= 1
                j += 1
        ck = coeffs.coeffs[n]
        if ck:
            s = [sv + ck * wv for sv, wv in zip(s, w)]
        else:
            s = list(s)
        rows.append(s)
    return rows


def spectrum(f: GridFunction) -> set[int]:
    """Indices of nonzero Walsh coefficients.

    Exact mode: literally nonzero.  Floating mode: |coeff| above
    1e-12 * max |coeff|, which absorbs butterfly roundoff.
    """
    c = forward_fwht(f)
    if f.mode == "exact":
        return {k for k, v in enumerate(c.coeffs) if v != 0}
    peak = max(abs(v) for v in c.coeffs)
    if peak == 0.0:
        return set()
    return {k for k, v in enumerate(c.coeffs) if abs(v) > TOL_EQ * peak}


def paley_to_hadamard(coeffs: Sequence) -> list:
    """Reorder Paley-indexed coefficients into natural (Hadamard) order."""
    M = (len(coeffs)).bit_length() - 1
    rev = _rev_table(M)
    return [coeffs[rev[i]] for i in range(len(coeffs))]


def paley_to_sequency(coeffs: Sequence) -> list:
    """Reorder Paley-indexed coefficients into sequency (sign-change) order."""
    out = []
    for s in range(len(coeffs)):
        out.append(coeffs[s ^ (s >> 1)])
    return out


def fwht_benchmark(m_lo: int, m_hi: int, reps: int = 3, seed: int = 0) -> list[dict]:
    """Wall-clock throughput of the floating forward transform, M = m_lo..m_hi.

    Informational: reports seconds and butterfly throughput (M 2^M ops/s);
    no pass/fail thresholds are attached to the timings.
    """
    import time

    rng = np.random.default_rng(seed)
    rows = []
    for m in range(m_lo, m_hi + 1):
        f = GridFunction.from_values(rng.standard_normal(1 << m).tolist(), "float")
        best = float("inf")
        for _ in range(reps):
            t0 = time.perf_counter()
            forward_fwht(f)
            best = min(best, time.perf_counter() - t0)
        ops = m * (1 << m)
        rows.append(
            {
                "resolution": m,
                "seconds": best,
                "butterfly_ops": ops,
                "ops_per_second": ops / best if best > 0 else float("inf"),
            }
        )
    return rows


def random_grid(
    resolution: int,
    mode: Mode = "exact",
    seed: int = 0,
    low: int = -9,
    high: int = 9,
) -> GridFunction:
    """Seeded random grid function; exact mode draws small integers."""
    rng = random.Random(seed)
    n = 1 << resolution
    if mode == "exact":
        vals: Iterable = (Fraction(rng.randint(low, high)) for _ in range(n))
    else:
        vals = (rng.gauss(0.0, 1.0) for _ in range(n))
    return GridFunction.from_values(list(vals), mode)
