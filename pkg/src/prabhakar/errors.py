"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PrabhakarError(Exception):
    """Base class for all library errors."""


class DomainError(PrabhakarError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class HypothesisError(DomainError):
    """A point violates the hypotheses under which an inequality is claimed."""


class EmptyGridError(DomainError):
    """No grid point survives the hypothesis filter of a claim."""


class NonConvergenceError(PrabhakarError, ArithmeticError):
    """A series could not be summed to the requested tolerance."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
