"""De la Vallee Poussin means, their maximal operators, and weak-type profiles.

The mean of order n averages the partial sums S_k over the window
k = n - lambda_n .. n (lambda_n + 1 terms, with S_0 = 0 contributing
nothing when the window reaches zero).  Bulk evaluation goes through
prefix sums of the partial-sum matrix, so a full curve costs O(4^M).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import DyadicPoint
from .errors import PreconditionError, WindowInvariantError
from .walsh import GridFunction, partial_sum_all, partial_sum_with_flag
from .windows import WindowSequence

__all__ = [
    "VPMeanResult",
    "vp_mean",
    "vp_mean_curve",
    "cesaro_maximal",
    "vp_maximal",
    "weak_type_profile",
    "weak_type_sup",
    "domination_report",
]


@dataclass(frozen=True)
class VPMeanResult:
    n: int
    window: int  # lambda_n
    value: object
    clamped: bool


def _window_at(window: WindowSequence, n: int) -> int:
    lam = window.value(n)
    if not 1 <= lam <= n:
        raise WindowInvariantError(n, lam, "outside [1, n]")
    return lam


def vp_mean(f: GridFunction, window: WindowSequence, n: int, x: DyadicPoint) -> VPMeanResult:
    """Average of S_k(f; x) over k = n - lambda_n .. n."""
    if n < 1:
        raise PreconditionError(f"vp_mean needs n >= 1, got {n}")
    lam = _window_at(window, n)
    total = Fraction(0) if f.mode == "exact" else 0.0
    clamped = False
    for k in range(n - lam, n + 1):
        v, c = partial_sum_with_flag(f, k, x)
        total += v
        clamped = clamped or c
    if f.mode == "exact":
        return VPMeanResult(n, lam, Fraction(total, lam + 1), clamped)
    return VPMeanResult(n, lam, total / (lam + 1), clamped)


def vp_mean_curve(
    f: GridFunction,
    window: WindowSequence,
    n_max: int,
    max_resolution: int = 12,
):
    """Matrix V[n][i] for 1 <= n <= n_max at every grid cell (row 0 is zeros).

    Computed from prefix sums of the partial-sum matrix in O(4^M) total.
    """
    M = f.resolution
    if not 1 <= n_max <= (1 << M):
        raise PreconditionError(f"n_max must lie in [1, 2^M]; got {n_max}")
    srows = partial_sum_all(f, n_max, max_resolution=max_resolution)
    if f.mode == "float":
        cum = np.cumsum(np.asarray(srows), axis=0)
        out = [np.zeros(1 << M)]
        for n in range(1, n_max + 1):
            lam = _window_at(window, n)
            lo = n - lam - 1
            win = cum[n] - (cum[lo] if lo >= 0 else 0.0)
            out.append(win / (lam + 1))
        return out
    cum = [list(srows[0])]
    for n in range(1, n_max + 1):
        cum.append([a + b for a, b in zip(cum[-1], srows[n])])
    zero_row = [Fraction(0)] * (1 << M)
    out = [zero_row]
    for n in range(1, n_max + 1):
        lam = _window_at(window, n)
        lo = n - lam - 1
        base = cum[lo] if lo >= 0 else zero_row
        out.append([Fraction(a - b, lam + 1) for a, b in zip(cum[n], base)])
    return out


def cesaro_maximal(
    f: GridFunction,
    n_max: int | None = None,
    max_resolution: int = 12,
) -> GridFunction:
    """sup over 1 <= n <= n_max of the Cesaro average (1/n) sum_{k<=n} |S_k(f; x)|.

    Monotone nondecreasing in n_max; default n_max = 2^M, beyond which the
    partial sums are constant.
    """
    M = f.resolution
    if n_max is None:
        n_max = 1 << M
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    srows = partial_sum_all(f, min(n_max, 1 << M), max_resolution=max_resolution)
    if f.mode == "float":
        acc = np.zeros(1 << M)
        best = np.full(1 << M, -np.inf)
        last = np.abs(np.asarray(srows[-1]))
        for n in range(1, n_max + 1):
            acc = acc + (np.abs(srows[n]) if n < len(srows) else last)
            best = np.maximum(best, acc / n)
        return GridFunction.from_values([float(v) for v in best], "float")
    acc = [Fraction(0)] * (1 << M)
    best: list = [None] * (1 << M)
    last = [abs(v) for v in srows[-1]]
    for n in range(1, n_max + 1):
        row = [abs(v) for v in srows[n]] if n < len(srows) else last
        acc = [a + r for a, r in zip(acc, row)]
        for i, a in enumerate(acc):
            cand = Fraction(a, n)
            if best[i] is None or cand > best[i]:
                best[i] = cand
    return GridFunction.from_values(best, "exact")


def vp_maximal(
    f: GridFunction,
    window: WindowSequence,
    n_max: int | None = None,
    max_resolution: int = 12,
) -> GridFunction:
    """Pointwise max of |V_n(f)| over 1 <= n <= n_max (default n_max = 2^M)."""
    M = f.resolution
    if n_max is None:
        n_max = 1 << M
    curve_top = min(n_max, 1 << M)
    rows = vp_mean_curve(f, window, curve_top, max_resolution=max_resolution)
    if f.mode == "float":
        best = np.full(1 << M, -np.inf)
        for n in range(1, curve_top + 1):
            best = np.maximum(best, np.abs(rows[n]))
        fvals = np.asarray(f.values, dtype=np.float64)
        for n in range(curve_top + 1, n_max + 1):
            lam = _window_at(window, n)
            if n - lam >= (1 << M):
                best = np.maximum(best, np.abs(fvals))
                break  # all later windows sit past the degree; V_n = f
            v = np.asarray(
                [vp_mean(f, window, n, DyadicPoint.from_index(i, M)).value for i in range(1 << M)]
            )
            best = np.maximum(best, np.abs(v))
        return GridFunction.from_values([float(v) for v in best], "float")
    best = [max(abs(rows[n][i]) for n in range(1, curve_top + 1)) for i in range(1 << M)]
    for n in range(curve_top + 1, n_max + 1):
        lam = _window_at(window, n)
        if n - lam >= (1 << M):
            best = [max(b, abs(v)) for b, v in zip(best, f.values)]
            break
        for i in range(1 << M):
            v = vp_mean(f, window, n, DyadicPoint.from_index(i, M)).value
            if abs(v) > best[i]:
                best[i] = abs(v)
    return GridFunction.from_values(best, "exact")


def weak_type_profile(g: GridFunction, thresholds) -> list[tuple]:
    """Rows (t, t * measure{g > t}) with the measure counted exactly on the grid."""
    if any(v < 0 for v in g.values):
        raise PreconditionError("weak_type_profile requires a nonnegative grid function")
    cells = 1 << g.resolution
    out = []
    for t in thresholds:
        if t <= 0:
            raise PreconditionError(f"thresholds must be positive, got {t}")
        count = sum(1 for v in g.values if v > t)
        if g.mode == "exact":
            out.append((Fraction(t), Fraction(t) * Fraction(count, cells)))
        else:
            out.append((float(t), float(t) * count / cells))
    return out


def weak_type_sup(g: GridFunction):
    """sup over t > 0 of t * measure{g > t}, attained in the limit t -> v- at
    grid values v, hence equal to max over distinct values of v * measure{g >= v}."""
    if any(v < 0 for v in g.values):
        raise PreconditionError("weak_type_sup requires a nonnegative grid function")
    cells = 1 << g.resolution
    svals = sorted(g.values)
    best = Fraction(0) if g.mode == "exact" else 0.0
    for pos, v in enumerate(svals):
        if pos and svals[pos - 1] == v:
            continue
        # pos cells lie strictly below v, so measure{g >= v} = (cells - pos)/cells
        cand = (
            Fraction(v) * Fraction(cells - pos, cells)
            if g.mode == "exact"
            else float(v) * (cells - pos) / cells
        )
        if cand > best:
            best = cand
    return best


def weak_type_experiment(
    count: int,
    resolution: int,
    seed: int,
    threshold_grid: int = 64,
) -> dict:
    """Empirical weak-type constant of the Cesaro maximal operator.

    Draws `count` seeded random functions, normalizes each to unit L1 norm,
    computes sup_t t*measure{cesaro_maximal > t} exactly on the grid, and
    reports the largest constant seen.  The constant is measured, never
    asserted against a bound.  Streaming evaluation: no partial-sum matrix
    is stored.
    """
    import random as _random

    from .walsh import forward_fwht

    rng = _random.Random(seed)
    M = resolution
    size = 1 << M
    idx = np.arange(size, dtype=np.int64)
    rad = [1.0 - 2.0 * ((idx >> (M - 1 - j)) & 1) for j in range(M)]
    per_function = []
    profile_rows = []
    for fi in range(count):
        vals = np.array([rng.gauss(0.0, 1.0) for _ in range(size)])
        l1 = np.abs(vals).mean()
        vals = vals / l1
        f = GridFunction.from_values([float(v) for v in vals], "float")
        coeffs = np.asarray(forward_fwht(f).coeffs)
        w = np.ones(size)
        s = np.zeros(size)
        cum = np.zeros(size)
        best = np.zeros(size)
        for n in range(1, size + 1):
            k = n - 1
            if k:
                flips = (k - 1) ^ k
                j = 0
                while flips:
                    if flips & 1:
                        w = w * rad[j]
                    flips >>= 1
                    j += 1
            s = s + coeffs[k] * w
            cum = cum + np.abs(s)
            np.maximum(best, cum / n, out=best)
        star = GridFunction.from_values([float(v) for v in best], "float")
        sup = weak_type_sup(star)
        per_function.append(float(sup))
        if fi == 0:
            lo, hi = float(best.min()), float(best.max())
            lo = max(lo, hi / (1 << 20))
            ts = [lo * (hi / lo) ** (i / (threshold_grid - 1)) for i in range(threshold_grid)]
            profile_rows = [(t, tm) for t, tm in weak_type_profile(star, ts)]
    return {
        "count": count,
        "resolution": resolution,
        "seed": seed,
        "per_function": per_function,
        "max_constant": max(per_function),
        "first_function_profile": profile_rows,
    }


def domination_report(
    f: GridFunction,
    window: WindowSequence,
    theta: Fraction,
    n_max: int | None = None,
    max_resolution: int = 12,
) -> dict:
    """Finite-n comparison of the VP maximal function against the Cesaro one.

    Uses n0 = smallest n from which lambda_n >= theta*n holds onward in the
    probed range, and the constant C = 1/theta + 1; returns the pointwise
    slack  C*cesaro + sum_{n<n0}|V_n|  minus  vp_maximal, whose entries must
    all be nonnegative.
    """
    theta = Fraction(theta)
    M = f.resolution
    if n_max is None:
        n_max = 1 << M
    n0 = n_max + 1
    for n in range(n_max, 0, -1):
        if window.value(n) * theta.denominator >= theta.numerator * n:
            n0 = n
        else:
            break
    big = vp_maximal(f, window, n_max, max_resolution=max_resolution)
    star = cesaro_maximal(f, n_max, max_resolution=max_resolution)
    c = 1 / theta + 1
    lowers = [[abs(v) for v in vp_mean_curve(f, window, n, max_resolution=max_resolution)[n]]
              for n in range(1, min(n0, n_max + 1))]
    slack = []
    for i in range(1 << M):
        rhs = c * star.values[i] + sum(row[i] for row in lowers)
        slack.append(rhs - big.values[i])
    return {"n0": n0, "constant": c, "slack": slack, "holds": all(s >= 0 for s in slack)}
