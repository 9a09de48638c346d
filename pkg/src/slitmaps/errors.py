"""Exception and warning classes shared across the package."""


class SlitMapError(Exception):
    """Base class for all errors raised by slitmaps."""


class QuadratureError(SlitMapError):
    """A quadrature did not reach its declared tolerance."""


class ProximityError(SlitMapError):
    """An evaluation point lies on (or too close to) the support of a measure."""


class PoleProximityError(ProximityError):
    """A Cauchy transform vanishes, so its reciprocal has a pole here."""


class DomainError(SlitMapError, ValueError):
    """An argument lies outside the domain of the operation."""


class GeometryError(SlitMapError, ValueError):
    """A polyline is not a valid slit (self-intersecting, wrong half-plane, ...)."""


class RefinementError(SlitMapError):
    """A discretisation could not be refined within its budget."""


class SupportError(SlitMapError, ValueError):
    """The support of a measure does not have the structure an analysis needs."""


class NoWeldingError(SlitMapError):
    """No decreasing welding homeomorphism matches the density/Hilbert profile."""

    def __init__(self, message, location=None, witness=None):
        super().__init__(message)
        self.location = location
        self.witness = witness or {}


class SingularPointError(SlitMapError):
    """``H - i d`` vanishes at an interior point, so the slit curve is undefined."""


class HorizonError(SlitMapError):
    """Doubling the Loewner horizon did not converge."""


class ExtrapolationError(SlitMapError):
    """An epsilon schedule is invalid for extrapolation."""


class ResamplingWarning(UserWarning):
    """Emitted whenever densities are resampled onto a common grid."""


class ExcludedMassWarning(UserWarning):
    """An atom falls inside the principal-value window and is excluded."""
