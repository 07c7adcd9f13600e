"""Exception types shared across the package.

Argument errors (bad sizes, bad ranges) are plain ``ValueError``.
"""


class DomainError(ValueError):
    """Input lies outside the domain where an operation is defined."""


class PreconditionError(ValueError):
    """Parameters violate the hypothesis an estimate or witness needs."""


class DivergenceError(ArithmeticError):
    """An integral diverges, or an iteration blew up.

    ``trace`` carries the iteration history when raised by a solver.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InconsistencyError(RuntimeError):
    """Computed data contradict a structural property that must hold."""
