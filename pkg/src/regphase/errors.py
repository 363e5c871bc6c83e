"""Exception types shared across the package."""


class RegPhaseError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(RegPhaseError):
    """A requested power or truncation index exceeds the space dimension."""


class DomainError(RegPhaseError):
    """A parameter lies outside its mathematically admissible range."""


class TruncationOverflow(RegPhaseError):
    """A raising operation would push amplitude past the highest Fock level."""


class BoundViolation(RegPhaseError):
    """A certified inequality failed on a grid check (implementation bug)."""


class TailMassError(RegPhaseError):
    """Too much state weight lies beyond the truncation for the request."""


class QuadratureUnderResolved(RegPhaseError):
    """Node counts do not meet the polynomial/trigonometric exactness need."""


class GridUnderResolved(RegPhaseError):
    """A phase grid is too coarse for the harmonic content it must resolve."""


class InvalidDensity(RegPhaseError):
    """A matrix fails the density-operator requirements."""
