"""Exception types shared across the package.

Each class maps to one failure category so the CLI can translate them
into stable exit codes (see cli.EXIT_CODES).
"""


class RootDensityError(Exception):
    """Base class for all package-specific errors."""


class DegenerateLeadingCoefficient(RootDensityError):
    """Leading coefficient too small to normalize; caller must reduce degree."""


class MixedDegreeBatch(RootDensityError):
    """A batch mixed polynomials of different degrees."""


class BatchFormatError(RootDensityError):
    """Malformed binary or text batch/roots file."""


class FamilyFormatError(RootDensityError):
    """Malformed parametric-family definition file."""


class ExpressionEvalError(RootDensityError):
    """A coefficient expression produced a non-finite value."""


class DegenerateFit(RootDensityError):
    """Least-squares fit produced a leading coefficient below the monic threshold."""


class DimensionMismatch(RootDensityError):
    """Density grids of different shapes cannot be merged."""


class LengthMismatch(RootDensityError):
    """Root sets of different lengths cannot be matched."""


class NoConvergence(RootDensityError):
    """Iterative reference solver did not reach the residual target."""


class IllegalState(RootDensityError):
    """Scheduler state with out-of-range fields."""
