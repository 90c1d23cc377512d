"""Exception hierarchy shared by all modules."""


class NMCError(Exception):
    """Base class for numerical failures raised by this package."""


class DomainError(NMCError, ValueError):
    """An argument lies outside the region where a formula is valid."""


class PositivityError(DomainError):
    """A band profile is not bounded away from zero."""


class NonIntegrableSingularityError(DomainError):
    """The caller declared a singular exponent that is not integrable."""


class NonConvergenceError(NMCError):
    """An iterative or adaptive procedure exhausted its budget."""


class BracketError(NMCError):
    """A root could not be bracketed."""


class DegenerateEigenvalueError(NMCError):
    """An eigenvalue that must be inverted is numerically zero."""


class CrossingError(NMCError):
    """A ray met more boundary crossings than the budget allows."""


class OffBoundaryError(DomainError):
    """An evaluation point does not lie on the boundary of the set."""
