"""Exception types shared across the package.

The CLI maps DomainError (and subclasses) to exit code 1 and I/O or usage
problems to exit code 2, so library code should raise these rather than
bare ValueError where the distinction matters.
"""


class DomainError(ValueError):
    """An argument violates a documented precondition or value range."""


class GeometryError(DomainError):
    """Degenerate scene geometry (zero distances, points on the screen plane, ...)."""
