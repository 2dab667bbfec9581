#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Times the four hot kernels on representative inputs (the degree-7 photon
polynomial, the 4x4 drift matrix, the vectorized Lyapunov solve, the
covariance integrator) and the full steady-state pipeline built on top of
whichever backend is active.

Run after an editable install:  python3 benchmarks/bench_kernels.py
"""

import argparse
import time

import numpy as np

from kerrmech import SystemParams, enumerate_states, numerics
from kerrmech.fluctuations import stationary_occupation
from kerrmech.numerics import _kernels_py

try:
    from kerrmech.numerics import _kernels_cy
except ImportError:
    _kernels_cy = None

TWO_PI = 2.0 * np.pi
OMEGA_M = TWO_PI * 356.6e3
KAPPA = TWO_PI * 77e3


def timeit(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_backends(repeats):
    rng = np.random.default_rng(1)
    poly = np.poly(rng.uniform(0.5, 8.0, 7))[::-1].copy()
    drift = rng.standard_normal((4, 4))
    drift -= (np.max(np.linalg.eigvals(drift).real) + 0.5) * np.eye(4)
    noise = rng.standard_normal((4, 4))
    noise = noise @ noise.T

    backends = [("pure", _kernels_py)]
    if _kernels_cy is not None:
        backends.append(("compiled", _kernels_cy))

    cases = [
        ("poly_roots (deg 7)", lambda b: b.poly_roots(poly)),
        ("dense_eigen (4x4)", lambda b: b.dense_eigen(drift)),
        ("lyapunov_solve (4x4)", lambda b: b.lyapunov_solve(drift, noise)),
        ("integrate_lyapunov", lambda b: b.integrate_lyapunov(drift, noise)),
    ]
    print(f"{'kernel':<24}" + "".join(f"{name:>14}" for name, _ in backends)
          + f"{'speedup':>10}")
    for label, call in cases:
        times = [timeit(lambda b=mod: call(b), repeats)
                 for _, mod in backends]
        row = f"{label:<24}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


def bench_pipeline(repeats):
    params = SystemParams(omega_m=OMEGA_M, kappa0=KAPPA, gamma_m=0.01 * KAPPA,
                          g_L=0.1 * KAPPA, g_NL=0.01 * KAPPA, delta=OMEGA_M,
                          E=3.0 * OMEGA_M, n0=1.0)

    def pipeline():
        states = enumerate_states(params)
        for s in states:
            if s.stability.is_stable:
                stationary_occupation(s, params)

    t = timeit(pipeline, repeats)
    print(f"\nsteady-state pipeline on the active backend "
          f"({numerics.BACKEND}): {t * 1e3:.2f} ms/point")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()
    bench_backends(args.repeats)
    bench_pipeline(max(args.repeats // 10, 50))


if __name__ == "__main__":
    main()
