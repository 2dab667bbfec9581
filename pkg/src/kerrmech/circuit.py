"""Electromechanical calculator for the achievable Kerr-coupling constants.

Two capacitively coupled Cooper-pair boxes in a microwave resonator act as
a four-level artificial molecule whose self-Kerr coefficient depends on the
mutual capacitance, hence on the displacement x of the membrane-mounted
box.  This module evaluates the closed-form coefficient algebra: the
position-dependent capacitance, the exchange rate J(x), the coresonant
detuning, the Kerr coefficient eta(x) with its analytic derivative, and
the conversions to the dimensionless couplings of the cavity model.

Unit conventions
----------------
All frequencies stored on :class:`CircuitParams` are angular (rad/s).
Values quoted as "X/2pi" in the literature should be multiplied by 2*pi on
ingestion; values quoted bare are taken as already angular (config flag
``assume_bare_angular`` in :mod:`kerrmech.config` makes this auditable).
The quoted reference numbers mix both conventions and are not exactly
reproducible; ``j_scale`` exposes the exchange-rate normalization as an
explicit knob (1.0 keeps the printed e^2/2 prefactor with hbar).
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import e as _e, epsilon_0, hbar

from .errors import ParameterError, PlateCollisionError

__all__ = [
    "CircuitParams",
    "GeneralKerrInputs",
    "mutual_capacitance",
    "exchange_coupling",
    "coresonant_detuning",
    "kerr_vs_detuning",
    "kerr_general",
    "kerr_simplified",
    "nonlinear_coupling_dim",
    "cancellation_detuning",
    "optical_cavity_estimate",
    "to_system_couplings",
]


@dataclass(frozen=True)
class CircuitParams:
    """Electromechanical parameters (frequencies angular, capacitances F,
    lengths m).

    ``g`` and ``gamma`` use the symmetric simplification g1 = g2 = g and
    gamma_21 = gamma_23 = gamma_43 = gamma.  The cavity pull enters the
    coresonant detuning through omega_c(x) = omega_c0 - G_L_dim*x; set
    ``couple_cavity_position=False`` to freeze the cavity frequency for
    sensitivity studies.
    """

    g: float            # cavity-molecule coupling (rad/s)
    gamma: float        # spontaneous decay rate (rad/s)
    omega_C: float      # control coupling (rad/s)
    omega_c0: float     # bare cavity frequency (rad/s)
    omega_x: float      # qubit tuning knob (rad/s)
    G_L_dim: float      # linear cavity pull (rad/s per m), any sign
    C0: float           # zero-displacement mutual capacitance (F)
    d0: float           # plate gap (m)
    C_sigma1: float     # circuit capacitance (F)
    C_sigma2: float     # circuit capacitance (F)
    x_zp: float         # mechanical zero-point motion (m)
    couple_cavity_position: bool = True
    j_scale: float = 1.0

    def __post_init__(self):
        for name in ("g", "gamma", "omega_C", "omega_c0", "omega_x", "C0",
                     "d0", "C_sigma1", "C_sigma2", "x_zp", "j_scale"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")


@dataclass(frozen=True)
class GeneralKerrInputs:
    """Inputs of the general four-level Kerr formula, before the symmetric
    simplification."""

    g1: float
    g2: float
    gamma_43: float
    gamma_21: float
    gamma_23: float
    Delta: float
    delta: float
    omega_C: float

    def __post_init__(self):
        if not self.omega_C > 0:
            raise ParameterError("omega_C must be positive")


def mutual_capacitance(x: float, params: CircuitParams) -> float:
    """Parallel-plate mutual capacitance C_m(x) = C0*d0/(d0 - x)."""
    if x >= params.d0:
        raise PlateCollisionError(f"x = {x} reaches the plate gap {params.d0}")
    return params.C0 * params.d0 / (params.d0 - x)


def _mutual_capacitance_derivative(x: float, params: CircuitParams) -> float:
    return params.C0 * params.d0 / (params.d0 - x) ** 2


def _k12(params: CircuitParams) -> tuple[float, float]:
    return (params.C_sigma1 + params.C_sigma2,
            params.C_sigma1 * params.C_sigma2)


def exchange_coupling(x: float, params: CircuitParams) -> float:
    """Capacitive exchange rate J(x) = e^2 C_m / (2 hbar (k1 C_m + k2)),
    k1 = C_s1 + C_s2, k2 = C_s1*C_s2, scaled by ``j_scale``.

    Saturates at e^2/(2 hbar k1) for large C_m.
    """
    cm = mutual_capacitance(x, params)
    k1, k2 = _k12(params)
    return params.j_scale * _e**2 * cm / (2.0 * hbar * (k1 * cm + k2))


def _exchange_coupling_derivative(x: float, params: CircuitParams) -> float:
    cm = mutual_capacitance(x, params)
    dcm = _mutual_capacitance_derivative(x, params)
    k1, k2 = _k12(params)
    return params.j_scale * _e**2 * k2 * dcm / (2.0 * hbar * (k1 * cm + k2) ** 2)


def coresonant_detuning(x: float, params: CircuitParams) -> float:
    """Detuning at the coresonance point,
    Delta(x) = sqrt(J(x)^2 + 4 omega_x^2) + J(x) - omega_c(x)."""
    j = exchange_coupling(x, params)
    omega_c = params.omega_c0
    if params.couple_cavity_position:
        omega_c = omega_c - params.G_L_dim * x
    return np.sqrt(j**2 + 4.0 * params.omega_x**2) + j - omega_c


def _coresonant_detuning_derivative(x: float, params: CircuitParams) -> float:
    j = exchange_coupling(x, params)
    dj = _exchange_coupling_derivative(x, params)
    slope = dj * (j / np.sqrt(j**2 + 4.0 * params.omega_x**2) + 1.0)
    if params.couple_cavity_position:
        slope += params.G_L_dim
    return slope


def kerr_vs_detuning(delta: float, g: float, gamma: float,
                     omega_C: float) -> float:
    """Symmetric Kerr coefficient as a function of the detuning:
    eta = Delta (g^4/Omega_C^2) [1/(gamma^2+Delta^2) - 1/(4 gamma^2+Delta^2)].

    Odd in Delta.  The bracket is evaluated in the algebraically identical
    form 3 gamma^2 / ((gamma^2+Delta^2)(4 gamma^2+Delta^2)), which does not
    cancel catastrophically for |Delta| >> gamma.
    """
    g2 = gamma**2
    return (delta * g**4 / omega_C**2
            * 3.0 * g2 / ((g2 + delta**2) * (4.0 * g2 + delta**2)))


def _kerr_detuning_derivative(delta: float, g: float, gamma: float,
                              omega_C: float) -> float:
    g2 = gamma**2
    d2 = delta**2
    return (g**4 / omega_C**2 * 3.0 * g2
            * (4.0 * g2**2 - 5.0 * g2 * d2 - 3.0 * d2**2)
            / ((g2 + d2) ** 2 * (4.0 * g2 + d2) ** 2))


def kerr_general(inputs: GeneralKerrInputs) -> float:
    """General four-level Kerr coefficient, exactly as printed:
    (g1/Omega_C)^2 [g2^2 Delta/(gamma_43^2 + Delta)
                    - g1^2 delta/((gamma_21+gamma_23)^2 + delta^2)].

    The first denominator is linear in Delta as printed, which is
    dimensionally inconsistent with the symmetric form; the symmetric
    simplification therefore does not follow from this expression.  A
    validity warning is emitted outside the dispersive regime
    (g1/Omega_C)^2 << 1.
    """
    if (inputs.g1 / inputs.omega_C) ** 2 > 0.01:
        warnings.warn("(g1/Omega_C)^2 > 0.01: outside the dispersive regime "
                      "the formula was derived in")
    pref = (inputs.g1 / inputs.omega_C) ** 2
    return pref * (inputs.g2**2 * inputs.Delta
                   / (inputs.gamma_43**2 + inputs.Delta)
                   - inputs.g1**2 * inputs.delta
                   / ((inputs.gamma_21 + inputs.gamma_23) ** 2 + inputs.delta**2))


def kerr_simplified(x: float, params: CircuitParams) -> float:
    """Kerr coefficient eta(x) under the symmetric simplification; eta(0)
    is the constant coefficient eta0."""
    return kerr_vs_detuning(coresonant_detuning(x, params), params.g,
                            params.gamma, params.omega_C)


def nonlinear_coupling_dim(params: CircuitParams) -> float:
    """Dimensional nonlinear coupling G_NL = -d eta/dx at x = 0 (rad/s per m),
    by the analytic chain rule through Delta(x), J(x) and C_m(x)."""
    delta0 = coresonant_detuning(0.0, params)
    return -(_kerr_detuning_derivative(delta0, params.g, params.gamma,
                                       params.omega_C)
             * _coresonant_detuning_derivative(0.0, params))


def cancellation_detuning(params: CircuitParams) -> float:
    """Detuning of a stationary compensation molecule that cancels eta0:
    Delta_stationary = -Delta(0).  Works because eta is odd in Delta."""
    return -coresonant_detuning(0.0, params)


def optical_cavity_estimate(chi3_real: float, omega0: float, V_c0: float,
                            L0: float) -> tuple[float, float]:
    """Kerr coefficient and its position slope for a chi^(3)-filled cavity.

    eta(x) = 3 hbar omega(x)^2 Re[chi3] / (2 eps0 V_c(x)) with
    omega(x) = omega0 - (omega0/L0) x and V_c(x) = (L0 + x) V_c0 / L0.
    Returns (eta0, G_NL_dim) with G_NL_dim = -d eta/dx|_0 = 3 eta0/L0,
    so |G_NL_dim| * L0 = 3 |eta0| identically.
    """
    if not (L0 > 0 and V_c0 > 0):
        raise ParameterError("L0 and V_c0 must be positive")
    eta0 = 3.0 * hbar * omega0**2 * chi3_real / (2.0 * epsilon_0 * V_c0)
    return eta0, 3.0 * eta0 / L0


def to_system_couplings(params: CircuitParams, G_L_dim: float,
                        G_NL_dim: float) -> tuple[float, float]:
    """Couplings for the dimensionless coordinate q = x/x_zp:
    (g_L, g_NL) = (x_zp*G_L, x_zp*G_NL)."""
    if not params.x_zp > 0:
        raise ParameterError("x_zp must be positive")
    return params.x_zp * G_L_dim, params.x_zp * G_NL_dim
