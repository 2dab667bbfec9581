"""Classical steady states of the driven nonlinear cavity.

The coupled fixed-point equations for the membrane position and the cavity
amplitude close into a single degree-7 polynomial in the mean photon number
n_s; its positive real roots enumerate all classical steady states.  With
the Kerr coupling and the absorption slope switched off the polynomial
degenerates to the cubic of the purely linear theory.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics
from .errors import (ParameterError, UnderdeterminedPolynomialError,
                     UnphysicalLossError)
from .model import SystemParams, validate

__all__ = [
    "PolynomialCoefficients",
    "SteadyState",
    "build_polynomial",
    "photon_number_roots",
    "assemble_state",
    "enumerate_states",
]

log = logging.getLogger(__name__)

#: a companion-matrix root counts as real when |Im| <= REAL_TOL * (1 + |Re|)
REAL_TOL = 1e-8
#: accepted roots must satisfy |P(n)| <= RESIDUAL_TOL * sum |c_k n^k|
RESIDUAL_TOL = 1e-10
#: adjacent roots closer than this (relative) are flagged as marginal fold pairs
MARGINAL_GAP = 1e-6


@dataclass(frozen=True)
class PolynomialCoefficients:
    """Coefficients c[k] multiplying n_s^k, k = 0..7."""

    c: tuple

    def __post_init__(self):
        if len(self.c) != 8:
            raise ValueError("expected 8 coefficients (degree 7)")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.c, dtype=float)


#: Kerr-shift convention in the fluctuation detunings.  The linearization
#: of the two-photon interaction gives shifts proportional to g_NL*q_s*n_s
#: (photon-number enhanced); the printed equations drop the n_s factor,
#: which contradicts the figure phenomenology.  See the drift-matrix notes
#: in dynamics.py.
KERR_SHIFT_WITH_N = True


@dataclass
class SteadyState:
    """One classical fixed point with its derived effective quantities.

    ``G`` and ``Gamma`` use the phase convention in which the steady field
    amplitude is rotated real and positive, so both carry sqrt(n_s); the
    complex ``alpha_s`` from the fixed-point equation is kept for reference.
    ``stability`` is populated by :func:`kerrmech.dynamics.classify`.
    """

    n_s: float
    q_s: float
    alpha_s: complex
    kappa_qs: float            # total loss kappa0 + kappa_L*q_s
    delta_qs: float            # effective detuning Delta - g_L*q_s
    G: float                   # sqrt(2*n_s) * (g_L + 2*g_NL*n_s)
    Gamma: float               # sqrt(2*n_s) * kappa_L
    kerr_shift: float          # g_NL * q_s * n_s (see KERR_SHIFT_WITH_N)
    delta_small: float         # delta(q_s) = Delta(q_s) - 2*kerr_shift
    delta_y: float             # Delta(q_s) - 6*kerr_shift
    delta_prime_sq: float      # delta_small * delta_y
    p_s: float = 0.0           # q-dot = Omega_m * p vanishes at a fixed point
    alpha_residual: float = 0.0  # | |alpha_s|^2 - n_s | / max(n_s, tiny)
    root_marginal: bool = False  # near-degenerate fold pair
    stability: object = field(default=None, repr=False)


def build_polynomial(params: SystemParams) -> PolynomialCoefficients:
    """Coefficients of the degree-7 photon-number polynomial.

    c7 n^7 + ... + c1 n + c0 = 0 with c1 = Delta^2 + kappa0^2 and
    c0 = -E^2; the coupling terms follow the closed-form elimination of
    q_s from the fixed-point pair.
    """
    w = params.omega_m
    gl, gnl = params.g_L, params.g_NL
    kl, k0 = params.kappa_L, params.kappa0
    dl, e = params.delta, params.E
    c7 = 4.0 * gnl**4 / w**2
    c6 = 12.0 * gnl**3 * gl / w**2
    c5 = gnl**2 * (13.0 * gl**2 + kl**2) / w**2
    c4 = gnl * (6.0 * gl**3 + 2.0 * gl * kl**2 - 4.0 * gnl * dl * w) / w**2
    c3 = (gl**2 * (gl**2 + kl**2) / w**2
          - 6.0 * gnl * gl * dl / w
          + 2.0 * gnl * k0 * kl / w)
    c2 = 2.0 * gl * (k0 * kl - dl * gl) / w
    c1 = dl**2 + k0**2
    c0 = -e**2
    return PolynomialCoefficients((c0, c1, c2, c3, c4, c5, c6, c7))


def _rescaled(c: np.ndarray) -> tuple[np.ndarray, float]:
    """Substitute n = u * n_ref with n_ref = E^2/(Delta^2+kappa0^2) and
    normalize, so the companion matrix stays well conditioned across the
    ~30 orders of magnitude the raw coefficients can span."""
    if c[1] > 0 and c[0] < 0:
        n_ref = -c[0] / c[1]
    else:
        n_ref = 1.0
    scaled = c * n_ref ** np.arange(8)
    peak = np.max(np.abs(scaled))
    return scaled / peak, n_ref


def photon_number_roots(coeffs: PolynomialCoefficients) -> np.ndarray:
    """All physical (real, non-negative) photon-number roots, ascending.

    Roots come from companion-matrix eigenvalues of the rescaled polynomial
    and are Newton-polished; each accepted root satisfies the residual
    bound |P(n)| <= 1e-10 * sum_k |c_k n^k|, which also rejects complex
    pairs that drift onto the real axis without converging.  n = 0 appears
    only for E = 0.
    """
    c = coeffs.as_array()
    if np.all(c[1:] == 0.0):
        raise UnderdeterminedPolynomialError(
            "all n_s-dependent coefficients vanish; "
            "photon number underdetermined")
    scaled, n_ref = _rescaled(c)
    u_roots = numerics.poly_roots(scaled, polish=True)
    roots = u_roots * n_ref
    real = roots[np.abs(roots.imag) <= REAL_TOL * (1.0 + np.abs(roots.real))].real
    if real.size:
        ok = np.array([polynomial_residual(coeffs, n) <= RESIDUAL_TOL
                       for n in real])
        real = real[ok]
    if c[0] == 0.0:
        # exact vacuum root; drop its numerical images before re-adding it
        scale = max(np.max(np.abs(real)) if real.size else 0.0, 1.0)
        physical = np.concatenate(([0.0], real[real > 1e-12 * scale]))
    else:
        physical = real[real > 0.0]
    physical = np.sort(physical)
    # polishing can collapse numerically split images of one root; genuine
    # fold pairs sit far above this gap and survive
    if physical.size > 1:
        keep = np.ones(physical.size, dtype=bool)
        for i in range(1, physical.size):
            if physical[i] - physical[i - 1] <= 1e-12 * max(physical[i], 1e-300):
                keep[i] = False
        physical = physical[keep]
    return physical


def polynomial_residual(coeffs: PolynomialCoefficients, n: float) -> float:
    """|P(n)| relative to the magnitude scale sum_k |c_k n^k|."""
    c = coeffs.as_array()
    powers = n ** np.arange(8)
    value = float(np.dot(c, powers))
    scale = float(np.dot(np.abs(c), np.abs(powers)))
    return abs(value) / scale if scale > 0 else abs(value)


def _pair_value(params: SystemParams, n: float) -> tuple[float, float]:
    """f(n) = n [kappa(q)^2 + Delta_eff(n)^2] - E^2 of the coupled
    fixed-point pair, and its derivative.  Unlike the expanded polynomial
    this form has no catastrophic cancellation, so it resolves roots far
    below the expanded conditioning floor."""
    w, gl, gnl = params.omega_m, params.g_L, params.g_NL
    q = (gl + gnl * n) * n / w
    dq = (gl + 2.0 * gnl * n) / w
    kappa = params.kappa0 + params.kappa_L * q
    dkappa = params.kappa_L * dq
    det = params.delta - q * (gl + 2.0 * gnl * n)
    ddet = -dq * (gl + 2.0 * gnl * n) - 2.0 * gnl * q
    f = n * (kappa**2 + det**2) - params.E**2
    df = kappa**2 + det**2 + 2.0 * n * (kappa * dkappa + det * ddet)
    return f, df


def _refine_root(params: SystemParams, n0: float,
                 iters: int = 60) -> tuple[float, float]:
    """Newton-polish a candidate against the direct pair equation; returns
    the best (n, |f|/E^2) seen."""
    scale = max(params.E**2, 1e-300)
    best = cur = n0
    best_res = abs(_pair_value(params, cur)[0]) / scale
    for _ in range(iters):
        f, df = _pair_value(params, cur)
        if df == 0.0 or not np.isfinite(df):
            break
        step = f / df
        cur = cur - step
        if cur <= 0.0:
            cur = 0.5 * (cur + step)  # half-step back into the domain
        res = abs(_pair_value(params, cur)[0]) / scale
        if res < best_res:
            best_res, best = res, cur
        if abs(step) <= 1e-16 * (1.0 + abs(cur)):
            break
    return best, best_res


def assemble_state(n_s: float, params: SystemParams) -> SteadyState:
    """Fill a complete steady-state record for a photon-number root.

    Raises UnphysicalLossError when the total loss at the resulting
    membrane position is not positive.
    """
    if n_s < 0:
        raise ValueError(f"n_s must be >= 0, got {n_s}")
    w = params.omega_m
    gl, gnl = params.g_L, params.g_NL
    q_s = (gl + gnl * n_s) * n_s / w
    kappa_qs = params.kappa0 + params.kappa_L * q_s
    if not kappa_qs > 0:
        raise UnphysicalLossError(
            f"total loss {kappa_qs} <= 0 at q_s = {q_s}; state rejected")
    delta_eff = params.delta - gl * q_s - 2.0 * gnl * q_s * n_s
    alpha_s = params.E / (kappa_qs + 1j * delta_eff)
    amp = np.sqrt(n_s)
    delta_qs = params.delta - gl * q_s
    kerr_shift = gnl * q_s * (n_s if KERR_SHIFT_WITH_N else 1.0)
    delta_small = delta_qs - 2.0 * kerr_shift
    delta_y = delta_qs - 6.0 * kerr_shift
    residual = abs(abs(alpha_s)**2 - n_s) / max(n_s, 1e-300)
    return SteadyState(
        n_s=n_s,
        q_s=q_s,
        alpha_s=alpha_s,
        kappa_qs=kappa_qs,
        delta_qs=delta_qs,
        G=np.sqrt(2.0) * amp * (gl + 2.0 * gnl * n_s),
        Gamma=np.sqrt(2.0) * amp * params.kappa_L,
        kerr_shift=kerr_shift,
        delta_small=delta_small,
        delta_y=delta_y,
        delta_prime_sq=delta_small * delta_y,
        alpha_residual=residual,
    )


#: candidate acceptance for the direct refinement: the companion route may
#: leave conditioning-limited imaginary noise on genuinely real roots
_CANDIDATE_IM_TOL = 1e-5
#: accepted states must satisfy the pair equation to this relative residual
_PAIR_RESIDUAL_TOL = 1e-9


def _physical_roots(params: SystemParams) -> np.ndarray:
    """Companion-matrix candidates refined against the direct pair
    equation; drops spurious nearly-real candidates and recovers roots
    beyond the expanded polynomial's conditioning floor."""
    c = build_polynomial(params).as_array()
    scaled, n_ref = _rescaled(c)
    candidates = numerics.poly_roots(scaled, polish=True) * n_ref
    keep = (np.abs(candidates.imag)
            <= _CANDIDATE_IM_TOL * (1.0 + np.abs(candidates.real)))
    refined = []
    for n0 in candidates[keep].real:
        if n0 <= 0.0:
            continue
        n, residual = _refine_root(params, n0)
        if residual <= _PAIR_RESIDUAL_TOL and n > 0.0:
            refined.append(n)
        else:
            log.debug("candidate n_s=%g dropped (pair residual %g)",
                      n0, residual)
    refined = np.sort(np.asarray(refined))
    if refined.size > 1:
        keep_mask = np.ones(refined.size, dtype=bool)
        for i in range(1, refined.size):
            if refined[i] - refined[i - 1] <= 1e-12 * max(refined[i], 1e-300):
                keep_mask[i] = False
        refined = refined[keep_mask]
    return refined


def enumerate_states(params: SystemParams, classify: bool = True) -> list[SteadyState]:
    """All accepted steady states sorted by photon number ascending.

    Near-degenerate fold pairs are flagged marginal; roots with unphysical
    total loss are dropped (logged at debug level).  With ``classify`` the
    stability field of each state is populated.
    """
    violations = validate(params)
    if violations:
        raise ParameterError("; ".join(violations))
    if params.E == 0.0:
        states = [assemble_state(0.0, params)]
    else:
        roots = _physical_roots(params)
        states = []
        for i, n in enumerate(roots):
            try:
                state = assemble_state(n, params)
            except UnphysicalLossError as exc:
                log.debug("root n_s=%g dropped: %s", n, exc)
                continue
            gap_prev = (abs(n - roots[i - 1]) <= MARGINAL_GAP * max(abs(n), abs(roots[i - 1]))
                        if i > 0 else False)
            gap_next = (abs(roots[i + 1] - n) <= MARGINAL_GAP * max(abs(n), abs(roots[i + 1]))
                        if i + 1 < len(roots) else False)
            if gap_prev or gap_next:
                state = replace(state, root_marginal=True)
            states.append(state)
    if classify:
        from . import dynamics
        for state in states:
            state.stability = dynamics.classify(dynamics.drift_matrix(state, params))
    return states
