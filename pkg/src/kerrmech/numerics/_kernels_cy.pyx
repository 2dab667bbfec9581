# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the numerical kernels.

Same contracts as the pure backend (_kernels_py): polynomial roots via the
companion matrix, dense eigenvalues via balancing + Hessenberg reduction +
Francis double-shift QR, LU linear solves, vectorized Lyapunov solve and
4th-order propagator stepping with interval doubling.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt, log2, ceil

cnp.import_array()

BACKEND = "compiled"

DEF TAYLOR_THETA = 0.02


# ---------------------------------------------------------------------------
# dense eigenvalues: balance + elmhes + hqr (eigenvalues only)

cdef void _balance(double[:, ::1] a, int n) noexcept:
    cdef double RADIX = 2.0, sqrdx = 4.0
    cdef bint done = False
    cdef int i, j
    cdef double r, c, g, f, s
    while not done:
        done = True
        for i in range(n):
            r = 0.0
            c = 0.0
            for j in range(n):
                if j != i:
                    c += fabs(a[j, i])
                    r += fabs(a[i, j])
            if c != 0.0 and r != 0.0:
                g = r / RADIX
                f = 1.0
                s = c + r
                while c < g:
                    f *= RADIX
                    c *= sqrdx
                g = r * RADIX
                while c > g:
                    f /= RADIX
                    c /= sqrdx
                if (c + r) / f < 0.95 * s:
                    done = False
                    g = 1.0 / f
                    for j in range(n):
                        a[i, j] *= g
                    for j in range(n):
                        a[j, i] *= f


cdef void _elmhes(double[:, ::1] a, int n) noexcept:
    cdef int m, i, j
    cdef double x, y, tmp
    for m in range(1, n - 1):
        x = 0.0
        i = m
        for j in range(m, n):
            if fabs(a[j, m - 1]) > fabs(x):
                x = a[j, m - 1]
                i = j
        if i != m:
            for j in range(n):
                tmp = a[i, j]
                a[i, j] = a[m, j]
                a[m, j] = tmp
            for j in range(n):
                tmp = a[j, i]
                a[j, i] = a[j, m]
                a[j, m] = tmp
        if x != 0.0:
            for i in range(m + 1, n):
                y = a[i, m - 1]
                if y != 0.0:
                    y /= x
                    a[i, m - 1] = y
                    for j in range(m, n):
                        a[i, j] -= y * a[m, j]
                    for j in range(n):
                        a[j, m] += y * a[j, i]
    # entries below the first subdiagonal are reduction bookkeeping
    for i in range(2, n):
        for j in range(i - 1):
            a[i, j] = 0.0


cdef inline double _sign(double a, double b) noexcept:
    return fabs(a) if b >= 0.0 else -fabs(a)


cdef int _hqr(double[:, ::1] a, int n, double[::1] wr, double[::1] wi) except -1:
    """Francis double-shift QR on an upper Hessenberg matrix (in place)."""
    cdef int nn, m, l, k, j, its, i, mmin
    cdef double z, y, x, w, v, u, t, s, r, q, p, anorm

    anorm = 0.0
    for i in range(n):
        for j in range((i - 1) if i > 0 else 0, n):
            anorm += fabs(a[i, j])
    nn = n - 1
    t = 0.0
    r = q = p = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = fabs(a[l - 1, l - 1]) + fabs(a[l, l])
                if s == 0.0:
                    s = anorm
                if fabs(a[l, l - 1]) + s == s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = sqrt(fabs(q))
                x += t
                if q >= 0.0:
                    z = p + _sign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn] = z
                    wi[nn - 1] = -z
                nn -= 2
                break
            if its == 30:
                raise ArithmeticError("too many QR iterations")
            if its == 10 or its == 20:
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = fabs(a[nn, nn - 1]) + fabs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = fabs(p) + fabs(q) + fabs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = fabs(a[m, m - 1]) * (fabs(q) + fabs(r))
                v = fabs(p) * (fabs(a[m - 1, m - 1]) + fabs(z) +
                               fabs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
            for i in range(m + 3, nn + 1):
                a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = fabs(p) + fabs(q) + fabs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = _sign(sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return 0


def dense_eigen(a):
    """Eigenvalues of a small dense real matrix."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] work = \
        np.array(a, dtype=np.float64, order="C", copy=True)
    cdef int n = work.shape[0]
    if work.shape[1] != n:
        raise ValueError("matrix must be square")
    if n == 0:
        return np.empty(0, dtype=complex)
    if n == 1:
        return np.array([work[0, 0]], dtype=complex)
    cdef cnp.ndarray[double, ndim=1] wr = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] wi = np.empty(n)
    _balance(work, n)
    _elmhes(work, n)
    _hqr(work, n, wr, wi)
    return wr + 1j * wi


# ---------------------------------------------------------------------------
# polynomial roots: companion matrix + Newton polishing

cdef void _horner(double[::1] c, int nc, double complex x,
                  double complex *p, double complex *dp) noexcept:
    cdef double complex pv = 0.0, dv = 0.0
    cdef int k
    for k in range(nc - 1, -1, -1):
        dv = dv * x + pv
        pv = pv * x + c[k]
    p[0] = pv
    dp[0] = dv


def poly_roots(c, bint polish=True):
    """All complex roots of sum_k c[k] x^k via the companion matrix.

    Leading zero coefficients are trimmed; raises ValueError on the zero
    polynomial.
    """
    cdef cnp.ndarray[double, ndim=1] cc = \
        np.ascontiguousarray(c, dtype=np.float64)
    if cc.ndim != 1 or cc.size == 0 or not np.all(np.isfinite(cc)):
        raise ValueError("coefficients must be a finite 1-d array")
    cdef int deg = cc.size - 1
    while deg >= 0 and cc[deg] == 0.0:
        deg -= 1
    if deg < 0:
        raise ValueError("zero polynomial: roots are underdetermined")
    if deg == 0:
        return np.empty(0, dtype=complex)
    if deg == 1:
        return np.array([-cc[0] / cc[1]], dtype=complex)

    cdef cnp.ndarray[double, ndim=2, mode="c"] comp = np.zeros((deg, deg))
    cdef int i
    for i in range(deg - 1):
        comp[i + 1, i] = 1.0
    for i in range(deg):
        comp[i, deg - 1] = -cc[i] / cc[deg]
    cdef cnp.ndarray[double, ndim=1] wr = np.empty(deg)
    cdef cnp.ndarray[double, ndim=1] wi = np.empty(deg)
    _balance(comp, deg)
    _hqr(comp, deg, wr, wi)

    cdef cnp.ndarray[complex, ndim=1] roots = wr + 1j * wi
    if not polish:
        return roots
    cdef double[::1] cv = cc
    cdef double complex cur, best, step, pv, dv
    cdef double best_res, res
    cdef int j, it, stalled
    for j in range(deg):
        cur = roots[j]
        best = cur
        _horner(cv, deg + 1, cur, &pv, &dv)
        best_res = abs(pv)
        stalled = 0
        for it in range(40):
            _horner(cv, deg + 1, cur, &pv, &dv)
            if dv == 0.0:
                break
            step = pv / dv
            cur = cur - step
            _horner(cv, deg + 1, cur, &pv, &dv)
            res = abs(pv)
            if res < best_res:
                best_res = res
                best = cur
                stalled = 0
            else:
                # residuals bottom out at the evaluation noise floor well
                # before the steps pass any fixed threshold
                stalled += 1
            if stalled >= 2 or abs(step) <= 1e-15 * (1.0 + abs(cur)):
                break
        roots[j] = best
    return roots


# ---------------------------------------------------------------------------
# LU solve with partial pivoting

cdef int _lu_solve(double[:, ::1] m, double[::1] rhs, int n) except -1:
    cdef int i, j, k, piv
    cdef double big, tmp, factor
    for k in range(n):
        piv = k
        big = fabs(m[k, k])
        for i in range(k + 1, n):
            if fabs(m[i, k]) > big:
                big = fabs(m[i, k])
                piv = i
        if big == 0.0:
            raise ArithmeticError("singular linear system")
        if piv != k:
            for j in range(n):
                tmp = m[k, j]
                m[k, j] = m[piv, j]
                m[piv, j] = tmp
            tmp = rhs[k]
            rhs[k] = rhs[piv]
            rhs[piv] = tmp
        for i in range(k + 1, n):
            factor = m[i, k] / m[k, k]
            if factor != 0.0:
                m[i, k] = 0.0
                for j in range(k + 1, n):
                    m[i, j] -= factor * m[k, j]
                rhs[i] -= factor * rhs[k]
    for i in range(n - 1, -1, -1):
        tmp = rhs[i]
        for j in range(i + 1, n):
            tmp -= m[i, j] * rhs[j]
        rhs[i] = tmp / m[i, i]
    return 0


def linear_solve(a, b):
    """Solve a x = b for a small dense real system."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] m = \
        np.array(a, dtype=np.float64, order="C", copy=True)
    cdef cnp.ndarray[double, ndim=1] rhs = \
        np.array(b, dtype=np.float64, copy=True)
    cdef int n = m.shape[0]
    if m.shape[1] != n or rhs.size != n:
        raise ValueError("shape mismatch")
    _lu_solve(m, rhs, n)
    return rhs


def lyapunov_solve(a, d):
    """Solve A V + V A^T = -D via the vectorized n^2 x n^2 linear system."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] aa = \
        np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] dd = \
        np.ascontiguousarray(d, dtype=np.float64)
    cdef int n = aa.shape[0]
    cdef int n2 = n * n
    cdef cnp.ndarray[double, ndim=2, mode="c"] m = np.zeros((n2, n2))
    cdef cnp.ndarray[double, ndim=1] rhs = np.empty(n2)
    cdef int i, j, k
    for i in range(n):
        for j in range(n):
            rhs[i * n + j] = -dd[i, j]
            for k in range(n):
                m[i * n + j, k * n + j] += aa[i, k]   # from A V
                m[i * n + j, i * n + k] += aa[j, k]   # from V A^T
    _lu_solve(m, rhs, n2)
    cdef cnp.ndarray[double, ndim=2, mode="c"] v = rhs.reshape(n, n).copy()
    return 0.5 * (v + v.T)


# ---------------------------------------------------------------------------
# linear-ODE propagation: 4th-order Taylor step + interval doubling

cdef void _matmul(double[:, ::1] x, double[:, ::1] y, double[:, ::1] out,
                  int n) noexcept:
    cdef int i, j, k
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += x[i, k] * y[k, j]
            out[i, j] = s


cdef void _mult_abt(double[:, ::1] x, double[:, ::1] y, double[:, ::1] out,
                    int n) noexcept:
    """out = x y^T"""
    cdef int i, j, k
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += x[i, k] * y[j, k]
            out[i, j] = s


cdef void _abat(double[:, ::1] a, double[:, ::1] x, double[:, ::1] out,
                int n) noexcept:
    """out = a x + x a^T"""
    cdef int i, j, k
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += a[i, k] * x[k, j] + x[i, k] * a[j, k]
            out[i, j] = s


cdef double _fro(double[:, ::1] x, int n) noexcept:
    cdef double s = 0.0
    cdef int i, j
    for i in range(n):
        for j in range(n):
            s += x[i, j] * x[i, j]
    return sqrt(s)


cdef void _taylor4(double[:, ::1] a, int n, double s, double[:, ::1] phi):
    """phi = I + sA + (sA)^2/2 + (sA)^3/6 + (sA)^4/24"""
    cdef cnp.ndarray[double, ndim=2, mode="c"] term_ = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] nxt_ = np.empty((n, n))
    cdef double[:, ::1] term = term_
    cdef double[:, ::1] nxt = nxt_
    cdef int i, j, order
    for i in range(n):
        for j in range(n):
            phi[i, j] = 1.0 if i == j else 0.0
            term[i, j] = s * a[i, j]
    for order in range(1, 5):
        for i in range(n):
            for j in range(n):
                phi[i, j] += term[i, j]
        if order < 4:
            _matmul(term, a, nxt, n)
            for i in range(n):
                for j in range(n):
                    term[i, j] = nxt[i, j] * s / (order + 1)


cdef void _q_taylor4(double[:, ::1] a, double[:, ::1] d, int n, double s,
                     double[:, ::1] q):
    """q = s*D + s^2/2 S1 + s^3/6 S2 + s^4/24 S3 with S_{k+1} = A S_k + S_k A^T"""
    cdef cnp.ndarray[double, ndim=2, mode="c"] sk_ = np.array(d, copy=True)
    cdef cnp.ndarray[double, ndim=2, mode="c"] nxt_ = np.empty((n, n))
    cdef double[:, ::1] sk = sk_
    cdef double[:, ::1] nxt = nxt_
    cdef double fac = s
    cdef int i, j, order
    for i in range(n):
        for j in range(n):
            q[i, j] = fac * d[i, j]
    for order in range(2, 5):
        _abat(a, sk, nxt, n)
        for i in range(n):
            for j in range(n):
                sk[i, j] = nxt[i, j]
        fac *= s / order
        for i in range(n):
            for j in range(n):
                q[i, j] += fac * sk[i, j]


def propagate_linear(a, u0, double t):
    """u(t) for du/dt = A u by scaling and squaring of the Taylor step."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] aa = \
        np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] u = np.array(u0, dtype=np.float64)
    cdef int n = aa.shape[0]
    cdef double scale = _fro(aa, n) * fabs(t)
    cdef int k = 0
    if scale > 0.0:
        k = <int>ceil(log2(scale / TAYLOR_THETA))
        if k < 0:
            k = 0
    cdef cnp.ndarray[double, ndim=2, mode="c"] phi_ = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] tmp_ = np.empty((n, n))
    _taylor4(aa, n, t / (1 << k), phi_)
    cdef int step
    for step in range(k):
        _matmul(phi_, phi_, tmp_, n)
        phi_, tmp_ = tmp_, phi_
    return phi_ @ u


def integrate_lyapunov(a, d, t=None, double rtol=1e-9, int max_doublings=200):
    """V(t) = int_0^t exp(A s) D exp(A^T s) ds by interval doubling,
    V(2t) = V(t) + Phi V(t) Phi^T with Phi = exp(A t).

    With t=None the doubling runs until the increment drops below rtol,
    which requires a strictly stable A; RuntimeError otherwise.
    """
    cdef cnp.ndarray[double, ndim=2, mode="c"] aa = \
        np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] dd = \
        np.ascontiguousarray(d, dtype=np.float64)
    cdef int n = aa.shape[0]
    cdef cnp.ndarray[double, ndim=2, mode="c"] phi_ = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] q_ = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] t1_ = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] t2_ = np.empty((n, n))
    cdef double[:, ::1] q = q_
    cdef double[:, ::1] t1 = t1_
    cdef double[:, ::1] t2 = t2_
    cdef double anorm = _fro(aa, n)
    cdef double s, tt
    cdef int k, i, j, step

    if t is not None:
        tt = <double>t
        k = 0
        if anorm * tt > 0.0:
            k = <int>ceil(log2(anorm * tt / TAYLOR_THETA))
            if k < 0:
                k = 0
        s = tt / (1 << k)
        _taylor4(aa, n, s, phi_)
        _q_taylor4(aa, dd, n, s, q)
        for step in range(k):
            _matmul(phi_, q_, t1_, n)
            _mult_abt(t1, phi_, t2, n)
            for i in range(n):
                for j in range(n):
                    q[i, j] += t2[i, j]
            _matmul(phi_, phi_, t1_, n)
            phi_, t1_ = t1_, phi_
            t1 = t1_
        return 0.5 * (q_ + q_.T)

    s = TAYLOR_THETA / anorm if anorm > 0.0 else 1.0
    _taylor4(aa, n, s, phi_)
    _q_taylor4(aa, dd, n, s, q)
    for step in range(max_doublings):
        if _fro(phi_, n) ** 2 <= 0.5 * rtol:
            return 0.5 * (q_ + q_.T)
        if _fro(phi_, n) > 1e6:
            break
        _matmul(phi_, q_, t1_, n)
        _mult_abt(t1, phi_, t2, n)
        for i in range(n):
            for j in range(n):
                q[i, j] += t2[i, j]
        _matmul(phi_, phi_, t1_, n)
        phi_, t1_ = t1_, phi_
        t1 = t1_
    raise RuntimeError("covariance integration did not converge; "
                       "drift matrix is unstable or marginal")
