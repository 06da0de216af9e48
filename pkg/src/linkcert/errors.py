"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: validation and precondition
failures exit 2, budget violations exit 3, internal consistency failures
(a certified theorem apparently violated) exit 4.
"""


class LinkcertError(Exception):
    """Base class for all package errors."""


class ValidationError(LinkcertError):
    """Malformed input: bad parameters, schema violations, broken invariants."""


class BudgetError(LinkcertError):
    """A resource budget (simplex count) would be exceeded."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class PreconditionError(LinkcertError):
    """An operation's stated precondition does not hold for these inputs."""


class InternalConsistencyError(LinkcertError):
    """A certified mathematical guarantee failed to hold; indicates a bug
    or a rasterization fault, never a user error."""
