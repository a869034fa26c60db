"""Exception types shared across the package.

Validation failures (bad modulus, shapes, parameter combinations) are
ValueErrors; refusals to start work whose cost exceeds a configured cap
are RuntimeErrors.  The CLI maps the first family to exit code 2 and the
second to exit code 3.
"""


class InvalidModulusError(ValueError):
    """Modulus is not a prime in the supported range."""


class ShapeError(ValueError):
    """Matrix or vector has the wrong shape for the operation."""


class DomainError(ValueError):
    """Entries lie outside the operation's domain."""


class InvalidParamsError(ValueError):
    """Parameter combination is invalid (e.g. odd number of points to pair)."""


class BudgetExceededError(RuntimeError):
    """Exhaustive enumeration would exceed the configured budget."""


class CostGuardError(RuntimeError):
    """Predicted work size exceeds a hard cost cap."""
