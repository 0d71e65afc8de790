"""Window sequences: nondecreasing integer sequences with 1 <= lambda_n <= n.

A window controls the averaging length of the de la Vallee Poussin mean.
Each built-in family evaluates exactly at arbitrary-precision n, and the
unbounded-ratio families also carry an analytic witness: an exponent e such
that n / lambda_n > tau is guaranteed for every n >= 2^e.  The witness is
what lets divergence plans reason about windows at heights where no range
scan is possible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .errors import PreconditionError, WindowInvariantError

__all__ = ["WindowSequence", "window_from_spec"]


def _floor_pow(n: int, p: int, q: int) -> int:
    """floor(n ** (p/q)) for n >= 1, exact."""
    root, _ = gmpy2.iroot(gmpy2.mpz(n) ** p, q)
    return int(root)


@dataclass(frozen=True)
class WindowSequence:
    """A named window family with exact evaluation and optional ratio witness."""

    family: str
    params: tuple = field(default_factory=tuple)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def constant(c: int) -> "WindowSequence":
        if c < 1:
            raise PreconditionError(f"constant window needs c >= 1, got {c}")
        return WindowSequence("constant", (c,))

    @staticmethod
    def proportional(theta) -> "WindowSequence":
        theta = Fraction(theta)
        if not 0 < theta <= 1:
            raise PreconditionError(f"proportional window needs 0 < theta <= 1, got {theta}")
        return WindowSequence("proportional", (theta,))

    @staticmethod
    def root(theta) -> "WindowSequence":
        theta = Fraction(theta)
        if not 0 < theta < 1:
            raise PreconditionError(f"root window needs 0 < theta < 1, got {theta}")
        return WindowSequence("root", (theta,))

    @staticmethod
    def log_ratio() -> "WindowSequence":
        return WindowSequence("log_ratio", ())

    @staticmethod
    def table(values) -> "WindowSequence":
        vals = tuple(int(v) for v in values)
        prev = 1
        for i, v in enumerate(vals, start=1):
            if not 1 <= v <= i:
                raise WindowInvariantError(i, v, "outside [1, n]")
            if v < prev:
                raise WindowInvariantError(i, v, f"decreasing (previous {prev})")
            prev = v
        return WindowSequence("table", vals)

    # -- evaluation -----------------------------------------------------

    def value(self, n: int) -> int:
        """lambda_n, exact; n may be arbitrarily large for analytic families."""
        if n < 1:
            raise PreconditionError(f"window defined for n >= 1, got {n}")
        if self.family == "constant":
            return min(self.params[0], n)
        if self.family == "proportional":
            theta = self.params[0]
            return max(1, -((-theta.numerator * n) // theta.denominator))
        if self.family == "root":
            theta = self.params[0]
            return max(1, _floor_pow(n, theta.numerator, theta.denominator))
        if self.family == "log_ratio":
            # floor(n / ceil(log2(n+1))), clamped to its running maximum; the
            # running max is attained either at n itself or just before the
            # previous bit-length jump, so both candidates give a closed form.
            raw = n // n.bit_length()
            kp = (n + 1).bit_length() - 1
            return max(raw, ((1 << kp) - 1) // kp)
        if self.family == "table":
            if n > len(self.params):
                raise PreconditionError(
                    f"table window has {len(self.params)} entries; lambda_{n} unavailable"
                )
            return self.params[n - 1]
        raise PreconditionError(f"unknown window family {self.family!r}")

    # -- analytic facts -------------------------------------------------

    def ratio_bound(self) -> Fraction | None:
        """Finite upper bound for sup n/lambda_n when the family is bounded."""
        if self.family == "proportional":
            return 1 / self.params[0]
        return None

    def witness_exponent(self, tau_log2: int) -> int | None:
        """Smallest proven e with n/lambda_n > 2^tau_log2 for all n >= 2^e.

        Returns None when the family carries no such guarantee (bounded
        ratio, or table-backed).
        """
        if tau_log2 < 0:
            raise PreconditionError("tau_log2 must be >= 0")
        if self.family == "constant":
            # n/c > 2^t once n > c 2^t
            return tau_log2 + self.params[0].bit_length()
        if self.family == "root":
            # lambda_n <= n^theta, so the ratio beats 2^t once n^(1-theta) does
            theta = self.params[0]
            p, q = theta.numerator, theta.denominator
            return (tau_log2 * q) // (q - p) + 1
        if self.family == "log_ratio":
            # lambda_n <= n / floor(log2(n+1)), so the ratio beats 2^t once
            # floor(log2(n+1)) does
            return (1 << tau_log2) + 1
        return None

    # -- validation & reporting ------------------------------------------

    def validate_range(self, lo: int, hi: int) -> None:
        """Check 1 <= lambda_n <= n and monotonicity for all n in [lo, hi]."""
        prev = None
        for n in range(max(lo, 1), hi + 1):
            v = self.value(n)
            if not 1 <= v <= n:
                raise WindowInvariantError(n, v, "outside [1, n]")
            if prev is not None and v < prev:
                raise WindowInvariantError(n, v, f"decreasing (previous {prev})")
            prev = v

    def label(self) -> str:
        if self.family == "constant":
            return f"constant:{self.params[0]}"
        if self.family in ("proportional", "root"):
            return f"{self.family}:{self.params[0]}"
        if self.family == "table":
            return f"table[{len(self.params)}]"
        return self.family

    def to_json_obj(self) -> dict:
        return {"family": self.family, "params": [str(p) for p in self.params]}


def window_from_spec(spec: str) -> WindowSequence:
    """Parse CLI window specs like 'root:1/2', 'prop:0.5', 'const:8', 'logratio'."""
    name, _, arg = spec.partition(":")
    name = name.lower()
    if name in ("constant", "const"):
        return WindowSequence.constant(int(arg))
    if name in ("proportional", "prop"):
        return WindowSequence.proportional(Fraction(arg))
    if name == "root":
        return WindowSequence.root(Fraction(arg))
    if name in ("log_ratio", "logratio", "log-ratio"):
        return WindowSequence.log_ratio()
    if name == "table":
        return WindowSequence.table(int(v) for v in arg.split(","))
    raise PreconditionError(f"unknown window spec {spec!r}")
