"""Exception hierarchy shared across the package.

Invalid inputs (bad dimensions, out-of-range indices, malformed files) are
distinguished from numeric failures (degenerate Gram matrices, enumeration
guards) so the CLI can map them to distinct exit codes.
"""


class SphereprojError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SphereprojError, ValueError):
    """A caller-supplied argument violates a documented precondition."""


class SingularGramError(SphereprojError, ArithmeticError):
    """Gram matrix is singular or indefinite; the joint density does not exist."""


class EnumerationGuardError(SphereprojError, RuntimeError):
    """An operation would enumerate more items than its guard allows."""
