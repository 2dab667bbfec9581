"""numpy-backed fallback implementations of the numerical kernels.

Mirrors the contracts of the compiled backend in ``_kernels_cy.pyx``;
see ``kerrmech.numerics`` for the shared interface documentation.
"""

import numpy as np

BACKEND = "pure"

_TAYLOR_THETA = 0.02  # step size (in units of 1/max_scale) for the 4th-order propagator


def _horner(c: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polynomial (ascending coefficients) and derivative at x, vectorized."""
    p = np.zeros_like(x)
    dp = np.zeros_like(x)
    for k in range(len(c) - 1, -1, -1):
        dp = dp * x + p
        p = p * x + c[k]
    return p, dp


def _polish(c: np.ndarray, roots: np.ndarray, iters: int = 40) -> np.ndarray:
    """Newton-polish all roots in lockstep against the ascending-coefficient
    polynomial, keeping the best residual seen per root."""
    cur = np.array(roots, dtype=complex)
    best = cur.copy()
    best_res = np.abs(_horner(c, cur)[0])
    stalled = 0
    for _ in range(iters):
        p, dp = _horner(c, cur)
        safe = dp != 0.0
        step = np.where(safe, p / np.where(safe, dp, 1.0), 0.0)
        cur = cur - step
        res = np.abs(_horner(c, cur)[0])
        improved = res < best_res
        best[improved] = cur[improved]
        best_res[improved] = res[improved]
        # residuals bottom out at the evaluation noise floor well before
        # the steps shrink below any fixed threshold
        stalled = 0 if improved.any() else stalled + 1
        if stalled >= 2 or np.all(np.abs(step) <= 1e-15 * (1.0 + np.abs(cur))):
            break
    return best


def poly_roots(c, polish: bool = True) -> np.ndarray:
    """All complex roots of sum_k c[k] x^k via the companion matrix.

    Leading zero coefficients are trimmed.  Raises ValueError if every
    coefficient vanishes.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be a finite 1-d array")
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("zero polynomial: roots are underdetermined")
    deg = nz[-1]
    c = c[: deg + 1]
    if deg == 0:
        return np.empty(0, dtype=complex)
    if deg == 1:
        return np.array([-c[0] / c[1]], dtype=complex)
    monic = c / c[deg]
    comp = np.zeros((deg, deg))
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic[:deg]
    roots = np.linalg.eigvals(comp)
    if polish:
        roots = _polish(c, roots)
    return roots


def dense_eigen(a) -> np.ndarray:
    """Eigenvalues of a small dense real matrix."""
    a = np.asarray(a, dtype=float)
    return np.linalg.eigvals(a)


def linear_solve(a, b) -> np.ndarray:
    """Solve a x = b for a small dense real system."""
    try:
        return np.linalg.solve(np.asarray(a, dtype=float),
                               np.asarray(b, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(str(exc)) from exc


def lyapunov_solve(a, d) -> np.ndarray:
    """Solve A V + V A^T = -D via the vectorized n^2 x n^2 linear system."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    eye = np.eye(n)
    m = np.kron(a, eye) + np.kron(eye, a)
    v = linear_solve(m, -d.reshape(-1)).reshape(n, n)
    return 0.5 * (v + v.T)


def _taylor4_step(a: np.ndarray, d: np.ndarray | None, s: float):
    """Fourth-order expansions of the propagator Phi_s = exp(A s) and,
    when d is given, of Q_s = int_0^s exp(A u) D exp(A^T u) du."""
    n = a.shape[0]
    eye = np.eye(n)
    a2 = a @ a
    a3 = a2 @ a
    a4 = a3 @ a
    phi = eye + s * a + (s**2 / 2) * a2 + (s**3 / 6) * a3 + (s**4 / 24) * a4
    if d is None:
        return phi, None
    s1 = a @ d + d @ a.T
    s2 = a @ s1 + s1 @ a.T
    s3 = a @ s2 + s2 @ a.T
    q = s * d + (s**2 / 2) * s1 + (s**3 / 6) * s2 + (s**4 / 24) * s3
    return phi, q


def propagate_linear(a, u0, t: float) -> np.ndarray:
    """u(t) for du/dt = A u by scaling and squaring of the 4th-order
    Taylor propagator."""
    a = np.asarray(a, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    scale = np.linalg.norm(a) * abs(t)
    k = max(0, int(np.ceil(np.log2(scale / _TAYLOR_THETA)))) if scale > 0 else 0
    phi, _ = _taylor4_step(a, None, t / 2**k)
    for _ in range(k):
        phi = phi @ phi
    return phi @ u0


def integrate_lyapunov(a, d, t: float | None = None, rtol: float = 1e-9,
                       max_doublings: int = 200) -> np.ndarray:
    """V(t) = int_0^t exp(A s) D exp(A^T s) ds by step doubling.

    Uses V(2t) = V(t) + Phi V(t) Phi^T with Phi = exp(A t).  With
    ``t=None`` the doubling continues until the increment is below rtol,
    which requires A strictly stable; a RuntimeError is raised otherwise.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    anorm = np.linalg.norm(a)
    if t is not None:
        scale = anorm * t
        k = max(0, int(np.ceil(np.log2(scale / _TAYLOR_THETA)))) if scale > 0 else 0
        phi, q = _taylor4_step(a, d, t / 2**k)
        for _ in range(k):
            q = q + phi @ q @ phi.T
            phi = phi @ phi
        return 0.5 * (q + q.T)
    s = _TAYLOR_THETA / anorm if anorm > 0 else 1.0
    phi, q = _taylor4_step(a, d, s)
    for _ in range(max_doublings):
        if np.linalg.norm(phi) ** 2 <= 0.5 * rtol:
            return 0.5 * (q + q.T)
        if not np.all(np.isfinite(phi)) or np.linalg.norm(phi) > 1e6:
            break
        q = q + phi @ q @ phi.T
        phi = phi @ phi
    raise RuntimeError("covariance integration did not converge; "
                       "drift matrix is unstable or marginal")
