"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain an operation supports."""


class UsageError(ValueError):
    """Malformed configuration or command-line input."""


class ShapeError(ValueError):
    """Sample or coefficient arrays have an unusable shape."""


class InsufficientDataError(ValueError):
    """Not enough nonempty data (e.g. frequency shells) to run a fit."""


class CorruptedTableError(RuntimeError):
    """A multiplier table contains values that violate its invariants."""


class NonConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach its tolerance.

    Carries the last partial result and the magnitude of the last term or
    error estimate so callers can decide whether to reroute.
    """

    def __init__(self, message: str, partial: float = float("nan"),
                 last_term: float = float("nan")):
        super().__init__(message)
        self.partial = partial
        self.last_term = last_term
