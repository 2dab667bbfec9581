"""Stationary quantum fluctuations: diffusion matrix, Lyapunov covariance,
phonon occupation.

The thermal entry of the diffusion matrix is implemented with a positive
sign, +gamma_m*(2 n0 + 1): the opposite sign would make the matrix
indefinite and give a negative occupation in the decoupled limit instead
of the bath equilibrium n = n0.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import numerics
from .dynamics import DriftMatrix, classify
from .errors import NoStationaryStateError, UnphysicalAbsorptionError
from .model import SystemParams
from .steady_state import SteadyState

__all__ = [
    "DiffusionMatrix",
    "CovarianceMatrix",
    "diffusion_matrix",
    "solve_lyapunov",
    "phonon_number",
    "stationary_occupation",
]

_LYAP_RESIDUAL_REL = 1e-8
_NEGATIVE_N_TOL = 1e-9


@dataclass(frozen=True)
class DiffusionMatrix:
    """4x4 real symmetric noise-correlation matrix over (dq, dp, dX, dY)."""

    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.shape != (4, 4) or not np.allclose(d, d.T):
            raise ValueError("expected a symmetric 4x4 matrix")
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Stationary covariance matrix with the solver that produced it."""

    v: np.ndarray
    source: str  # "direct" | "integrated"

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (4, 4):
            raise ValueError(f"expected 4x4 matrix, got {v.shape}")
        object.__setattr__(self, "v", v)


def diffusion_matrix(state: SteadyState, params: SystemParams) -> DiffusionMatrix:
    """Diffusion matrix at a steady state.

    With position-dependent absorption the mechanical momentum picks up the
    extra noise Gamma^2/(4 kappa_1(q_s)) and a cross term Gamma/2 with the
    phase quadrature; both vanish identically when kappa_1(q_s) = 0.
    """
    kappa1 = params.kappa_L * state.q_s
    if kappa1 < 0:
        raise UnphysicalAbsorptionError(
            f"membrane absorption kappa_1(q_s) = {kappa1} < 0")
    d = np.zeros((4, 4))
    d[1, 1] = params.gamma_m * (2.0 * params.n0 + 1.0)
    if kappa1 > 0:
        d[1, 1] += state.Gamma**2 / (4.0 * kappa1)
        d[1, 3] = d[3, 1] = 0.5 * state.Gamma
    else:
        assert state.Gamma == 0.0, "Gamma must vanish when kappa_1(q_s) = 0"
    d[2, 2] = d[3, 3] = state.kappa_qs
    return DiffusionMatrix(d)


def solve_lyapunov(a: DriftMatrix, d: DiffusionMatrix) -> CovarianceMatrix:
    """Stationary covariance from A V + V A^T = -D.

    Requires a strictly stable drift matrix; marginal or unstable input
    raises NoStationaryStateError.  The solution is checked against the
    residual bound before being returned.
    """
    verdict = classify(a)
    if not verdict.is_stable:
        raise NoStationaryStateError(
            f"max Re(eigenvalue) = {verdict.max_real:g} is not < "
            f"-{verdict.eps_stab:g}; no stationary state")
    v = numerics.lyapunov_solve(a.a, d.d)
    residual = np.linalg.norm(a.a @ v + v @ a.a.T + d.d)
    scale = np.linalg.norm(d.d)
    if scale > 0 and residual > _LYAP_RESIDUAL_REL * scale:
        raise ArithmeticError(
            f"Lyapunov residual {residual:g} exceeds {_LYAP_RESIDUAL_REL} * ||D||")
    return CovarianceMatrix(v=v, source="direct")


def integrate_covariance(a: DriftMatrix, d: DiffusionMatrix,
                         rtol: float = 1e-9) -> CovarianceMatrix:
    """Oracle path: integrate dV/dt = A V + V A^T + D from V(0) = 0 to
    stationarity.  Independent of the direct vectorized solve."""
    try:
        v = numerics.integrate_lyapunov(a.a, d.d, t=None, rtol=rtol)
    except RuntimeError as exc:
        raise NoStationaryStateError(str(exc)) from exc
    return CovarianceMatrix(v=v, source="integrated")


def phonon_number(v: CovarianceMatrix) -> float:
    """Mean phonon occupation n = (V_qq + V_pp)/2 - 1/2.

    Tiny negative values from roundoff are clipped to zero with a warning;
    anything substantially negative indicates an inconsistent covariance.
    """
    n = 0.5 * (v.v[0, 0] + v.v[1, 1]) - 0.5
    if n < 0:
        if n < -_NEGATIVE_N_TOL:
            raise ArithmeticError(f"phonon number {n} below tolerance; "
                                  "covariance matrix inconsistent")
        warnings.warn(f"clipping slightly negative phonon number {n} to 0")
        n = 0.0
    return n


def stationary_occupation(state: SteadyState, params: SystemParams) -> float:
    """Convenience pipeline: drift + diffusion -> Lyapunov -> occupation."""
    from .dynamics import drift_matrix
    a = drift_matrix(state, params)
    d = diffusion_matrix(state, params)
    return phonon_number(solve_lyapunov(a, d))
