"""Exception types shared across the package."""


class KerrmechError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(KerrmechError, ValueError):
    """A parameter set violates its invariants."""


class UnderdeterminedPolynomialError(KerrmechError, ValueError):
    """All polynomial coefficients vanish; the photon number is undetermined."""


class UnphysicalLossError(KerrmechError, ValueError):
    """Total cavity loss kappa0 + kappa_L*q_s is not positive at a candidate
    steady state; the state is rejected."""


class UnphysicalAbsorptionError(KerrmechError, ValueError):
    """Membrane absorption kappa_L*q_s is negative (or zero with a nonzero
    absorption coupling), outside the validity of the noise model."""


class NoStationaryStateError(KerrmechError, RuntimeError):
    """The drift matrix is unstable or marginal; no stationary covariance
    exists."""


class PlateCollisionError(KerrmechError, ValueError):
    """Capacitor displacement reaches or exceeds the plate gap."""
