"""Physical parameter records, unit conventions and conversions.

Every rate stored on :class:`SystemParams` is an absolute angular frequency
in rad/s.  Ratio-style inputs (couplings in units of the mirror loss, drive
and detuning in units of the mechanical frequency, as used throughout the
figure recipes) are converted on ingestion by :mod:`kerrmech.config`.

The mechanical bath is specified by its mean occupation ``n0`` rather than a
temperature; the temperature is derived on demand by :func:`bath_temperature`
when the noise spectra need it.
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import ParameterError

__all__ = [
    "SystemParams",
    "UnitScale",
    "validate",
    "dimensionless_coupling",
    "bath_temperature",
    "mean_occupation",
]


@dataclass(frozen=True)
class SystemParams:
    """All rates and couplings defining the driven nonlinear cavity.

    Attributes
    ----------
    omega_m : float
        Mechanical angular frequency (rad/s), > 0.
    kappa0 : float
        Mirror photon-loss rate (rad/s), > 0.
    gamma_m : float
        Mechanical dissipation rate (rad/s), >= 0.
    g_L : float
        Linear optomechanical coupling for the dimensionless position
        (rad/s); any sign.
    g_NL : float
        Position-modulated Kerr coupling (rad/s); any sign.
    delta : float
        Detuning between cavity resonance and drive laser (rad/s); any sign.
    E : float
        Drive strength (rad/s), >= 0.
    n0 : float
        Mean phonon occupation of the mechanical bath, >= 0.
    kappa_L : float
        Slope of the position-dependent membrane absorption
        kappa_1(q) = kappa_L * q (rad/s per unit dimensionless position).
        Zero by default: constant membrane absorption is folded into
        ``kappa0``.
    """

    omega_m: float
    kappa0: float
    gamma_m: float
    g_L: float
    g_NL: float
    delta: float
    E: float
    n0: float
    kappa_L: float = 0.0


@dataclass(frozen=True)
class UnitScale:
    """Characteristic length ``x0`` (m) relating the dimensional position x
    to the dimensionless coordinate q = x/x0.  Typically the zero-point
    motion of the mechanical element."""

    x0: float

    def __post_init__(self):
        if not self.x0 > 0:
            raise ParameterError(f"x0 must be positive, got {self.x0}")


def validate(params: SystemParams) -> list[str]:
    """Return one message per violated invariant; empty means valid.

    Diagnostic only: nothing is raised here.  The total-loss invariant
    kappa0 + kappa_L*q_s > 0 depends on the steady state and is enforced
    when states are assembled.
    """
    violations = []
    if not params.omega_m > 0:
        violations.append(f"omega_m must be > 0, got {params.omega_m}")
    if not params.kappa0 > 0:
        violations.append(f"kappa0 must be > 0, got {params.kappa0}")
    if not params.gamma_m >= 0:
        violations.append(f"gamma_m must be >= 0, got {params.gamma_m}")
    if not params.n0 >= 0:
        violations.append(f"n0 must be >= 0, got {params.n0}")
    if not params.E >= 0:
        violations.append(f"E must be >= 0, got {params.E}")
    for name in ("omega_m", "kappa0", "gamma_m", "g_L", "g_NL", "delta", "E",
                 "n0", "kappa_L"):
        if not np.isfinite(getattr(params, name)):
            violations.append(f"{name} must be finite")
    return violations


def dimensionless_coupling(G_dim: float, scale: UnitScale) -> float:
    """Convert a coupling per unit length (rad/s per m) to the coupling for
    the dimensionless coordinate: g = x0 * G."""
    return scale.x0 * G_dim


def bath_temperature(n0: float, omega_m: float) -> float:
    """Bath temperature T0 (K) giving mean occupation ``n0`` at ``omega_m``.

    Inverts n0 = 1/(exp(hbar*omega_m/(k_B*T0)) - 1).  ``n0 = 0`` signals a
    zero-temperature bath and returns 0.0; the spectrum module then applies
    the T -> 0 limit coth -> sign(nu).
    """
    if n0 < 0:
        raise ParameterError(f"n0 must be >= 0, got {n0}")
    if not omega_m > 0:
        raise ParameterError(f"omega_m must be > 0, got {omega_m}")
    if n0 == 0:
        return 0.0
    return hbar * omega_m / (k_B * np.log1p(1.0 / n0))


def mean_occupation(T0: float, omega_m: float) -> float:
    """Mean phonon occupation at temperature ``T0`` (K); inverse of
    :func:`bath_temperature`."""
    if T0 < 0:
        raise ParameterError(f"T0 must be >= 0, got {T0}")
    if T0 == 0:
        return 0.0
    return 1.0 / np.expm1(hbar * omega_m / (k_B * T0))
