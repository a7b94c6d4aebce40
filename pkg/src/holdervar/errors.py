"""Error types raised by holdervar.

Each error subclasses the built-in exception callers would catch for the same
situation, so ``except ValueError`` keeps working around argument problems and
``except RuntimeError`` around numerical failures.
"""


class InvalidArgumentError(ValueError):
    """An argument is malformed or outside its documented range."""


class OutOfDomainError(ValueError):
    """A point lies outside the closed space-time cylinder."""


class TimeOrderingError(ValueError):
    """A kernel or potential was evaluated with s <= t (or s <= 0)."""


class UnsupportedOrderError(ValueError):
    """A derivative order, seminorm order or domain shape is not supported."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class InconsistencyError(RuntimeError):
    """A measured-constant quotient has a zero denominator but a nonzero numerator."""


class SolverFailureError(RuntimeError):
    """A time step of the finite-difference solver could not be solved."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step
