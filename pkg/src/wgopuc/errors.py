"""Exceptions raised when a numerical guard trips."""


class NumericalGuardError(ArithmeticError):
    """Base class for guarded numerical failures (CLI exit status 3)."""


class SmallDivisor(NumericalGuardError):
    """A denominator factor fell below the small-divisor threshold."""

    def __init__(self, message, magnitude=None, where=None):
        super().__init__(message)
        self.magnitude = magnitude
        self.where = where


class NotMonic(NumericalGuardError):
    """A constructed polynomial's leading coefficient is not 1 to tolerance."""


class SingularToeplitz(NumericalGuardError):
    """A Toeplitz moment determinant is numerically indistinguishable from 0."""
