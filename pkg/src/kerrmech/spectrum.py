"""Position-fluctuation noise spectrum S(nu) and its components.

S(nu) = |chi_eff|^2 [S_th + S_rp + S_abs] with the effective mechanical
susceptibility chi_eff; the thermal, radiation-pressure and absorption
components share the resonant denominator
(kappa^2 - nu^2 + delta'^2)^2 + 4 nu^2 kappa^2.

All routines accept scalar or array Fourier frequencies.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from .model import SystemParams, bath_temperature
from .steady_state import SteadyState

__all__ = [
    "SpectrumPoint",
    "thermal_spectrum",
    "radiation_pressure_spectrum",
    "absorption_spectrum",
    "effective_susceptibility",
    "spectrum_point",
    "spectrum_series",
    "find_peaks",
    "default_nu_grid",
]


@dataclass(frozen=True)
class SpectrumPoint:
    """Spectrum and effective-oscillator quantities at one frequency.

    ``gamma_eff`` is the dimensionless damping combination
    gamma_m/Omega_m + coupling corrections; ``omega_eff`` carries the sign
    of Omega_eff^2 when coupling corrections push it negative.
    """

    nu: float
    s_total: float
    s_thermal: float
    s_rp: float
    s_abs: float
    chi_eff_sq: float
    omega_eff: float
    gamma_eff: float


def thermal_spectrum(nu, params: SystemParams, T0: float):
    """Thermal noise component (gamma_m nu / Omega_m)[1 + coth(h nu / 2 kT)].

    ``T0 = 0`` applies the zero-temperature limit coth -> sign(nu).  The
    nu -> 0 limit at finite temperature is 2 gamma_m k_B T0 / (hbar Omega_m).
    """
    nu = np.asarray(nu, dtype=float)
    pref = params.gamma_m / params.omega_m
    if T0 == 0:
        out = pref * nu * (1.0 + np.sign(nu))
    else:
        x = hbar * nu / (2.0 * k_B * T0)
        limit = 2.0 * k_B * T0 / hbar  # nu * coth(x) as nu -> 0
        nu_coth = np.where(x == 0.0, limit,
                           nu / np.tanh(np.where(x == 0.0, 1.0, x)))
        out = pref * (nu + nu_coth)
    return out if out.ndim else float(out)


def _denominator(nu, state: SteadyState):
    kappa = state.kappa_qs
    base = kappa**2 - nu**2 + state.delta_prime_sq
    return base, base**2 + 4.0 * nu**2 * kappa**2


def radiation_pressure_spectrum(nu, state: SteadyState):
    """Radiation-pressure noise component; non-negative for all nu."""
    nu = np.asarray(nu, dtype=float)
    kappa = state.kappa_qs
    _, den = _denominator(nu, state)
    out = (2.0 * state.G**2 * kappa
           * (kappa**2 + nu**2 + state.delta_small**2) / den)
    return out if out.ndim else float(out)


def absorption_spectrum(nu, state: SteadyState, params: SystemParams):
    """Extra noise from position-dependent membrane absorption.

    Identically zero when kappa_1(q_s) = 0 (a removable limit: Gamma is
    proportional to kappa_L and vanishes with it).
    """
    nu = np.asarray(nu, dtype=float)
    kappa1 = params.kappa_L * state.q_s
    if kappa1 == 0.0:
        assert state.Gamma == 0.0, "Gamma must vanish when kappa_1(q_s) = 0"
        out = np.zeros_like(nu)
        return out if out.ndim else 0.0
    base, den = _denominator(nu, state)
    out = (state.Gamma**2 / (2.0 * kappa1)
           + 2.0 * state.G * state.Gamma * state.delta_small * base / den)
    return out if out.ndim else float(out)


def effective_susceptibility(nu, state: SteadyState, params: SystemParams):
    """(|chi_eff|^2, Omega_eff, Gamma_eff) at the given frequencies.

    chi_eff^-1 = (Omega_eff^2 - nu^2)/Omega_m - i nu Gamma_eff, with the
    coupling-correction fractions sharing the resonant denominator.
    """
    nu = np.asarray(nu, dtype=float)
    w = params.omega_m
    kappa = state.kappa_qs
    G, Gam, dl = state.G, state.Gamma, state.delta_small
    base, den = _denominator(nu, state)
    omega_eff_sq = (w**2
                    - w * dl * G**2 * base / den
                    + w * G * kappa * Gam * (kappa**2 + nu**2 + state.delta_prime_sq) / den)
    gamma_eff = (params.gamma_m / w
                 + (2.0 * dl * G**2 * kappa
                    - G * Gam * (kappa**2 + nu**2 - state.delta_prime_sq)) / den)
    chi_inv_sq = ((omega_eff_sq - nu**2) / w)**2 + nu**2 * gamma_eff**2
    chi_sq = 1.0 / chi_inv_sq
    omega_eff = np.sign(omega_eff_sq) * np.sqrt(np.abs(omega_eff_sq))
    if chi_sq.ndim:
        return chi_sq, omega_eff, gamma_eff
    return float(chi_sq), float(omega_eff), float(gamma_eff)


def _stability_warning(state: SteadyState):
    verdict = state.stability
    if verdict is None:
        return
    if not verdict.is_stable:
        kind = "a marginal" if verdict.is_marginal else "an unstable"
        warnings.warn(f"spectrum evaluated at {kind} steady state")


def _bath_temperature(params: SystemParams) -> float:
    return bath_temperature(params.n0, params.omega_m) if params.n0 > 0 else 0.0


def spectrum_point(nu: float, state: SteadyState, params: SystemParams,
                   T0: float | None = None) -> SpectrumPoint:
    """Full spectrum record at a single frequency."""
    _stability_warning(state)
    return _compose(float(nu), state, params,
                    _bath_temperature(params) if T0 is None else T0)


def _compose(nu, state, params, T0):
    s_th = thermal_spectrum(nu, params, T0)
    s_rp = radiation_pressure_spectrum(nu, state)
    s_abs = absorption_spectrum(nu, state, params)
    chi_sq, omega_eff, gamma_eff = effective_susceptibility(nu, state, params)
    return SpectrumPoint(
        nu=nu,
        s_total=chi_sq * (s_th + s_rp + s_abs),
        s_thermal=s_th,
        s_rp=s_rp,
        s_abs=s_abs,
        chi_eff_sq=chi_sq,
        omega_eff=omega_eff,
        gamma_eff=gamma_eff,
    )


def spectrum_series(nu_grid, state: SteadyState, params: SystemParams,
                    T0: float | None = None) -> list[SpectrumPoint]:
    """Spectrum records over a frequency grid, preserving grid order."""
    _stability_warning(state)
    T0 = _bath_temperature(params) if T0 is None else T0
    nu = np.asarray(nu_grid, dtype=float)
    s_th = np.broadcast_to(thermal_spectrum(nu, params, T0), nu.shape)
    s_rp = radiation_pressure_spectrum(nu, state)
    s_abs = np.broadcast_to(absorption_spectrum(nu, state, params), nu.shape)
    chi_sq, omega_eff, gamma_eff = effective_susceptibility(nu, state, params)
    total = chi_sq * (s_th + s_rp + s_abs)
    return [SpectrumPoint(nu=float(nu[i]), s_total=float(total[i]),
                          s_thermal=float(s_th[i]), s_rp=float(s_rp[i]),
                          s_abs=float(s_abs[i]), chi_eff_sq=float(chi_sq[i]),
                          omega_eff=float(omega_eff[i]),
                          gamma_eff=float(gamma_eff[i]))
            for i in range(nu.size)]


def find_peaks(series: list[SpectrumPoint]) -> list[tuple[float, float]]:
    """Local maxima of s_total by 3-point comparison with quadratic
    refinement of the peak abscissa; sorted by frequency."""
    if len(series) < 3:
        raise ValueError("need at least 3 points to locate peaks")
    peaks = []
    for i in range(1, len(series) - 1):
        y0, y1, y2 = (series[i - 1].s_total, series[i].s_total,
                      series[i + 1].s_total)
        if y1 > y0 and y1 >= y2:
            x0, x1, x2 = series[i - 1].nu, series[i].nu, series[i + 1].nu
            denom = (y0 - 2.0 * y1 + y2)
            if denom != 0.0:
                shift = 0.5 * (y0 - y2) / denom
                shift = max(-1.0, min(1.0, shift))
            else:
                shift = 0.0
            h = 0.5 * (x2 - x0)
            nu_pk = x1 + shift * h
            s_pk = y1 - 0.25 * (y0 - y2) * shift
            peaks.append((float(nu_pk), float(s_pk)))
    return sorted(peaks)


def default_nu_grid(omega_m: float, lo: float = 0.2, hi: float = 1.8,
                    count: int = 2001) -> np.ndarray:
    """Default frequency grid for peak studies, symmetric about Omega_m."""
    return np.linspace(lo * omega_m, hi * omega_m, count)
