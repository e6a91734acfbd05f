"""Exception types."""


class FeketeError(Exception):
    """Base class for library errors."""


class DomainError(FeketeError, ValueError):
    """A point, measure or set lies outside the admissible domain."""


class SingularError(FeketeError, ArithmeticError):
    """A Gram matrix or evaluation matrix is numerically singular."""


class ConvergenceError(FeketeError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap
