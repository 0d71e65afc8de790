"""Orlicz functions: convex growth gauges with certificate-grade evaluation.

Three families are built in:

  identity      omega(t) = t
  log_power(b)  omega(t) = t * (log(1+t))^b  with 0 < b < 1/2  (natural log)
  table(nodes)  piecewise-linear convex interpolant through rational nodes

Plan arithmetic never needs omega itself, only the unit ratio
omega(2^s) / 2^s; for log_power that is (log(1+2^s))^b, which we enclose in
a rational interval using MPFR directed rounding, so the huge argument 2^s
is never materialized.  Down-rounding a weight or up-rounding a membership
bound always moves in the safe direction for the certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .errors import PreconditionError

__all__ = ["OrliczFunction", "orlicz_from_spec"]

_PREC = 192

_LN2_LO = None
_LN2_HI = None


def _mpfr_to_fraction(x) -> Fraction:
    num, den = x.as_integer_ratio()
    return Fraction(num, den)


def _ln2_bounds() -> tuple[Fraction, Fraction]:
    global _LN2_LO, _LN2_HI
    if _LN2_LO is None:
        with gmpy2.context(precision=_PREC, round=gmpy2.RoundDown):
            _LN2_LO = _mpfr_to_fraction(gmpy2.log(gmpy2.mpfr(2)))
        with gmpy2.context(precision=_PREC, round=gmpy2.RoundUp):
            _LN2_HI = _mpfr_to_fraction(gmpy2.log(gmpy2.mpfr(2)))
    return _LN2_LO, _LN2_HI


def _pow_interval(x_lo: Fraction, x_hi: Fraction, beta: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of x^beta for 0 < x_lo <= x_hi and beta > 0 (monotone)."""
    with gmpy2.context(precision=_PREC, round=gmpy2.RoundDown):
        lo = gmpy2.exp(
            gmpy2.mpfr(beta.numerator)
            / beta.denominator
            * gmpy2.log(gmpy2.mpfr(x_lo.numerator) / x_lo.denominator)
        )
    with gmpy2.context(precision=_PREC, round=gmpy2.RoundUp):
        hi = gmpy2.exp(
            gmpy2.mpfr(beta.numerator)
            / beta.denominator
            * gmpy2.log(gmpy2.mpfr(x_hi.numerator) / x_hi.denominator)
        )
    return _mpfr_to_fraction(lo), _mpfr_to_fraction(hi)


def _log1p_pow2_bounds(s: int) -> tuple[Fraction, Fraction]:
    """Enclosure of log(1 + 2^s) for s >= 1 without forming 2^s.

    log(1+2^s) = s log 2 + log(1 + 2^-s), and 0 < log(1+2^-s) <= 2^-s.
    """
    lo2, hi2 = _ln2_bounds()
    slop = Fraction(1, 1 << min(s, 128))
    return s * lo2, s * hi2 + slop


@dataclass(frozen=True)
class OrliczFunction:
    """A named Orlicz function; convex, increasing, zero at zero."""

    family: str
    params: tuple = ()

    @staticmethod
    def identity() -> "OrliczFunction":
        return OrliczFunction("identity", ())

    @staticmethod
    def log_power(beta) -> "OrliczFunction":
        beta = Fraction(beta)
        if not 0 < beta < Fraction(1, 2):
            raise PreconditionError(f"log_power exponent must lie in (0, 1/2), got {beta}")
        return OrliczFunction("log_power", (beta,))

    @staticmethod
    def table(nodes) -> "OrliczFunction":
        """Piecewise-linear convex gauge through (t_i, y_i); extended with the
        last slope beyond the final node.  The implicit first node is (0, 0)."""
        pts = sorted((Fraction(t), Fraction(y)) for t, y in nodes)
        if not pts:
            raise PreconditionError("table gauge needs at least one node")
        prev_t, prev_y = Fraction(0), Fraction(0)
        prev_slope = None
        for t, y in pts:
            if t <= prev_t:
                raise PreconditionError(f"table abscissae must increase, got {t}")
            if y <= prev_y:
                raise PreconditionError(f"table gauge must increase, got value {y} at {t}")
            slope = (y - prev_y) / (t - prev_t)
            if prev_slope is not None and slope < prev_slope:
                raise PreconditionError(f"table gauge not convex near t={t}")
            prev_t, prev_y, prev_slope = t, y, slope
        return OrliczFunction("table", tuple(pts))

    # -- evaluation -------------------------------------------------------

    @property
    def rational_valued(self) -> bool:
        """True when omega maps rationals to rationals (exact plan arithmetic)."""
        return self.family in ("identity", "table")

    @property
    def scan_monotone(self) -> bool:
        """True when weight(a, q) * sqrt(q) is provably nondecreasing in q,
        enabling exponential search beyond the linear scan limit."""
        return self.family in ("identity", "log_power")

    def value_float(self, t: float) -> float:
        if t < 0:
            raise PreconditionError("gauge argument must be >= 0")
        if t == 0:
            return 0.0
        if self.family == "identity":
            return float(t)
        if self.family == "log_power":
            return float(t) * math.log1p(float(t)) ** float(self.params[0])
        return float(self._table_value(Fraction(t)))

    def _table_value(self, t: Fraction) -> Fraction:
        pts = self.params
        prev_t, prev_y = Fraction(0), Fraction(0)
        for tt, yy in pts:
            if t <= tt:
                return prev_y + (yy - prev_y) * (t - prev_t) / (tt - prev_t)
            prev_t, prev_y = tt, yy
        t1, y1 = pts[-1]
        t0, y0 = (pts[-2] if len(pts) > 1 else (Fraction(0), Fraction(0)))
        return y1 + (y1 - y0) / (t1 - t0) * (t - t1)

    def value_interval(self, t: Fraction) -> tuple[Fraction, Fraction]:
        """Rational enclosure of omega(t) for rational t >= 0."""
        t = Fraction(t)
        if t < 0:
            raise PreconditionError("gauge argument must be >= 0")
        if t == 0:
            return Fraction(0), Fraction(0)
        if self.family == "identity":
            return t, t
        if self.family == "table":
            v = self._table_value(t)
            return v, v
        beta = self.params[0]
        with gmpy2.context(precision=_PREC, round=gmpy2.RoundDown):
            llo = gmpy2.log1p(gmpy2.mpfr(t.numerator) / t.denominator)
        with gmpy2.context(precision=_PREC, round=gmpy2.RoundUp):
            lhi = gmpy2.log1p(gmpy2.mpfr(t.numerator) / t.denominator)
        plo, phi = _pow_interval(_mpfr_to_fraction(llo), _mpfr_to_fraction(lhi), beta)
        return t * plo, t * phi

    def unit_ratio_interval(self, exp: int) -> tuple[Fraction, Fraction]:
        """Rational enclosure of omega(2^exp) / 2^exp, without forming 2^exp
        when the family permits (log_power, identity)."""
        if exp < 0:
            raise PreconditionError("exponent must be >= 0")
        if self.family == "identity":
            return Fraction(1), Fraction(1)
        if self.family == "log_power":
            if exp == 0:
                lo, hi = self.value_interval(Fraction(1))
                return lo, hi
            llo, lhi = _log1p_pow2_bounds(exp)
            return _pow_interval(llo, lhi, self.params[0])
        if exp > 1 << 16:
            raise PreconditionError(
                f"table gauge cannot be evaluated at 2^{exp}; exponent too large"
            )
        t = Fraction(1 << exp)
        v = self._table_value(t)
        return v / t, v / t

    # -- validation ---------------------------------------------------------

    def validate(self, points: int = 257) -> dict:
        """Sampled structural report: monotonicity, convexity (slopes), the
        nondecreasing quotient omega(t)/t, and the subcritical tail
        omega(t)/(t sqrt(log t)) -> 0.  Violations are flagged, not raised."""
        ts = [2.0 ** (k / 8.0) for k in range(-64, -64 + points)]
        ys = [self.value_float(t) for t in ts]
        increasing = all(b > a for a, b in zip(ys, ys[1:]))
        slopes = [(y1 - y0) / (t1 - t0) for (t0, y0), (t1, y1) in zip(zip(ts, ys), zip(ts[1:], ys[1:]))]
        convex = all(s1 >= s0 * (1 - 1e-12) for s0, s1 in zip(slopes, slopes[1:]))
        quotient = [y / t for t, y in zip(ts, ys)]
        quotient_monotone = all(b >= a * (1 - 1e-12) for a, b in zip(quotient, quotient[1:]))
        tail_ts = [2.0**e for e in range(4, 64, 4)]
        tail = [self.value_float(t) / (t * math.sqrt(math.log(t))) for t in tail_ts]
        tail_decreasing = all(b <= a * (1 + 1e-12) for a, b in zip(tail, tail[1:]))
        subcritical = tail_decreasing and tail[-1] < tail[0]
        return {
            "zero_at_zero": self.value_float(0.0) == 0.0,
            "strictly_increasing": increasing,
            "convex": convex,
            "quotient_nondecreasing": quotient_monotone,
            "subcritical_tail_decreasing": tail_decreasing,
            "subcritical_tail_last": tail[-1],
            "subcritical_ok": subcritical,
            "sample_points": points,
        }

    def label(self) -> str:
        if self.family == "log_power":
            return f"log_power:{self.params[0]}"
        if self.family == "table":
            return f"table[{len(self.params)}]"
        return self.family

    def to_json_obj(self) -> dict:
        if self.family == "table":
            return {"family": "table", "nodes": [[str(t), str(y)] for t, y in self.params]}
        return {"family": self.family, "params": [str(p) for p in self.params]}


def orlicz_from_spec(spec: str) -> OrliczFunction:
    """Parse CLI gauge specs like 'identity', 'logpow:1/4', 'table:1=1,8=10'."""
    name, _, arg = spec.partition(":")
    name = name.lower()
    if name in ("identity", "id", "t"):
        return OrliczFunction.identity()
    if name in ("log_power", "logpow", "log-power"):
        return OrliczFunction.log_power(Fraction(arg))
    if name == "table":
        nodes = []
        for part in arg.split(","):
            t, _, y = part.partition("=")
            nodes.append((Fraction(t), Fraction(y)))
        return OrliczFunction.table(nodes)
    raise PreconditionError(f"unknown gauge spec {spec!r}")
