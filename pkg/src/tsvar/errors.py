"""Exception taxonomy shared by every layer of the package."""

from __future__ import annotations


class DomainError(ValueError):
    """A point, range or table entry falls outside the relevant time scale."""


class UnsupportedScaleError(ValueError):
    """The scale has the wrong shape for the requested operation."""


class PreconditionError(ValueError):
    """A documented structural precondition of an operation is violated."""


class ConvergenceError(RuntimeError):
    """An iterative numeric routine failed to reach its tolerance.

    Carries the best value seen so far in ``estimate`` and its error
    bound in ``error`` so callers can inspect the failed run.
    """

    def __init__(self, message: str, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
