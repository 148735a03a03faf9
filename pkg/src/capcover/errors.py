"""Semantic exceptions shared across the package."""


class CapCoverError(Exception):
    """Base class for all package errors."""


class DomainError(CapCoverError, ValueError):
    """An input violates an operation's contract (range, shape, parity)."""


class NumericError(CapCoverError, ArithmeticError):
    """An iteration failed to converge within its budget.

    Carries the best bracket known at failure time, when one exists.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket
