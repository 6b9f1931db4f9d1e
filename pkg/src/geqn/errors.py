"""Exception hierarchy shared by every module of the package."""


class GeqnError(Exception):
    """Base class for all errors raised by :mod:`geqn`."""


class DomainError(GeqnError, ValueError):
    """An argument lies outside the domain where a function is defined."""


class PreconditionError(GeqnError, ValueError):
    """A documented precondition of an operation does not hold."""


class RadiusUndetermined(GeqnError):
    """Bisection could not bracket the root defining a radius."""

    def __init__(self, name, message=None):
        self.name = name
        super().__init__(message or f"radius undetermined: {name} (no sign change in bracket)")


class UnsupportedError(GeqnError):
    """The operation needs data the problem does not carry."""


class InfeasibleError(GeqnError):
    """The convex set is empty, so no projection or solution exists."""


class SingularMatrixError(GeqnError, ArithmeticError):
    """A pivot fell below the singularity threshold."""


class SubproblemError(GeqnError):
    """The linearized subproblem has no acceptable solution."""


class NoLocalizedSolution(SubproblemError):
    """No subproblem solution lies in the requested ball."""


class NotStronglyRegular(GeqnError):
    """A piece of the localized inverse is singular or orientation-inconsistent."""


class ProblemFormatError(GeqnError, ValueError):
    """A problem file violates the documented schema."""
