"""Exception hierarchy.

Every error maps onto one CLI exit code through ``exit_code``.
"""


class HurwitzError(Exception):
    exit_code = 5


class DomainError(HurwitzError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    exit_code = 2


class ZeroMatrix(DomainError):
    """A nonzero positive matrix was required."""


class PatternMismatch(DomainError):
    """A word pattern does not match the requested (m, k)."""


class CapExceeded(HurwitzError):
    """An enumeration would exceed the configured word cap."""

    exit_code = 4


class NumericalError(HurwitzError):
    """A numerical check failed beyond its tolerance."""

    exit_code = 5


class NonConvergence(NumericalError):
    pass


class SplitInconsistent(NumericalError):
    pass


class MaxDepthExceeded(NumericalError):
    pass


class PoleProximity(NumericalError):
    pass


class ProductZero(HurwitzError):
    """The pair satisfies AB = 0, so every mixed trace vanishes."""

    exit_code = 2


class FileError(HurwitzError):
    """An input file could not be read or an output file written."""

    exit_code = 3
