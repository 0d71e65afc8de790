"""Exception taxonomy shared by the library and the CLI.

The CLI maps these onto its exit codes: verification failures exit 1,
usage/precondition problems exit 2, budget violations exit 3.
"""


class VpWalshError(Exception):
    """Base class for all library errors."""


class PreconditionError(VpWalshError):
    """An operation was called outside its stated domain."""


class BudgetError(VpWalshError):
    """A resolution / size / bit budget would be exceeded."""


class VerificationError(VpWalshError):
    """An exact check that must hold failed; the message carries the witness."""


class WindowInvariantError(PreconditionError):
    """A window sequence violates 1 <= lambda_n <= n or monotonicity."""

    def __init__(self, n: int, value: int, reason: str):
        self.n = n
        self.value = value
        super().__init__(f"window invariant violated at n={n}: lambda_n={value} ({reason})")
