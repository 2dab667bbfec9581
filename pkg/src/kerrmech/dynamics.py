"""Linearized fluctuation dynamics: drift matrix, eigenvalues, stability.

The quadrature basis is ordered (dq, dp, dX, dY).  Eigenvalue real parts
are decay (or growth) rates; imaginary parts are the dressed frequencies
of the hybridized mechanical and optical modes.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .model import SystemParams
from .steady_state import SteadyState

__all__ = [
    "DriftMatrix",
    "StabilityVerdict",
    "drift_matrix",
    "classify",
    "verify_by_integration",
    "STABILITY_EPS_REL",
]

#: stability threshold relative to max(Omega_m, kappa(q_s)); marginal cases
#: with |max Re| below the threshold are neither stable nor unstable
STABILITY_EPS_REL = 1e-9

#: dressed frequencies closer than this (relative) are merged as one mode
_FREQ_MERGE_REL = 1e-6


@dataclass(frozen=True)
class DriftMatrix:
    """4x4 real drift matrix over (dq, dp, dX, dY)."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (4, 4):
            raise ValueError(f"expected 4x4 matrix, got {a.shape}")
        object.__setattr__(self, "a", a)

    @property
    def omega_m(self) -> float:
        return self.a[0, 1]

    @property
    def kappa(self) -> float:
        return -self.a[2, 2]


@dataclass(frozen=True)
class StabilityVerdict:
    """Eigenvalue-based stability classification of a drift matrix."""

    eigenvalues: np.ndarray      # sorted by (Re, Im)
    max_real: float
    is_stable: bool              # max_real < -eps_stab
    is_marginal: bool            # |max_real| <= eps_stab
    dressed_frequencies: np.ndarray  # distinct |Im|, ascending
    decay_rates: np.ndarray      # -Re per eigenvalue, same order as eigenvalues
    eps_stab: float


def drift_matrix(state: SteadyState, params: SystemParams) -> DriftMatrix:
    """Drift matrix of the linearized Langevin equations at a fixed point.

    The off-diagonal optical entries are the two Kerr-shifted detunings
    delta(q_s) = Delta(q_s) - 2*s and Delta(q_s) - 6*s with the shift
    s = g_NL*q_s*n_s carried by the steady state; their product is
    -delta'(q_s)^2.  Linearizing the two-photon interaction makes the shift
    photon-number enhanced, and only that form reproduces the avoided
    crossing and branch stability of the strong-coupling regime, so it is
    used here even though the equations were originally printed without
    the n_s factor.  Reduces to the standard linear optomechanical drift
    matrix for g_NL = 0 and Gamma = 0.
    """
    a = np.array([
        [0.0, params.omega_m, 0.0, 0.0],
        [-params.omega_m, -params.gamma_m, state.G, 0.0],
        [-state.Gamma, 0.0, -state.kappa_qs, state.delta_small],
        [state.G, 0.0, -state.delta_y, -state.kappa_qs],
    ])
    return DriftMatrix(a)


def classify(a: DriftMatrix) -> StabilityVerdict:
    """Eigenvalues and stability verdict for a drift matrix.

    The threshold eps_stab = STABILITY_EPS_REL * max(Omega_m, kappa) is
    read off the matrix itself, so the verdict is meaningful across unit
    scales; fold points sit exactly at marginality and are reported as
    marginal rather than stable.
    """
    eig = numerics.dense_eigen(a.a)
    order = np.lexsort((eig.imag, eig.real))
    eig = eig[order]
    max_real = float(np.max(eig.real))
    eps = STABILITY_EPS_REL * max(abs(a.omega_m), abs(a.kappa))
    freqs = np.sort(np.abs(eig.imag))
    distinct = []
    for f in freqs:
        if not distinct or f - distinct[-1] > _FREQ_MERGE_REL * max(f, 1e-300):
            distinct.append(f)
    return StabilityVerdict(
        eigenvalues=eig,
        max_real=max_real,
        is_stable=max_real < -eps,
        is_marginal=abs(max_real) <= eps,
        dressed_frequencies=np.asarray(distinct),
        decay_rates=-eig.real,
        eps_stab=eps,
    )


def verify_by_integration(a: DriftMatrix, horizon: float, trials: int = 8,
                          seed: int = 0) -> bool:
    """Independent stability check: propagate random unit vectors over the
    horizon and report whether the norm contracted for all of them.

    Agrees with :func:`classify` whenever |max Re| is well clear of the
    marginality threshold.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        u0 = rng.standard_normal(4)
        u0 /= np.linalg.norm(u0)
        u = numerics.propagate_linear(a.a, u0, horizon)
        if not np.all(np.isfinite(u)) or np.linalg.norm(u) >= 1.0:
            return False
    return True
