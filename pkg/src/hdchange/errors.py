"""Exception types shared across the package."""


class ChangePointError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ChangePointError, ValueError):
    """Array shapes are inconsistent with each other."""


class NotPositiveDefinite(ChangePointError):
    """A matrix required to be SPD has an eigenvalue at or below tolerance."""


class ZeroChange(ChangePointError):
    """A change vector with positive norm is required."""


class NonPositiveVariance(ChangePointError):
    """Component variances must be strictly positive."""


class DegenerateProjection(ChangePointError):
    """The projected noise has (numerically) zero variance."""


class ZeroVariance(ChangePointError):
    """A variance estimate collapsed to zero (constant series)."""


class AllZero(ChangePointError):
    """The CUSUM trajectory vanishes everywhere; no argmax is defined."""


class NotProportional(ChangePointError):
    """The closed form requires the change to be proportional to the factor."""


class ZeroDependence(ChangePointError):
    """No common-factor contamination; the misspecified-panel limit is void."""


class NonPositivePrice(ChangePointError):
    """Prices must be strictly positive to take log returns."""
