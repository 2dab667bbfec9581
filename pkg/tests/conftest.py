import numpy as np
import pytest

from kerrmech import SystemParams

TWO_PI = 2.0 * np.pi

#: operating frequencies used throughout the experiments we benchmark against
OMEGA_M = TWO_PI * 356.6e3
KAPPA = TWO_PI * 77e3


def make_params(g_L=0.0, g_NL=0.0, delta=OMEGA_M, E=0.0, n0=1.0,
                gamma_m=0.01 * KAPPA, kappa_L=0.0, omega_m=OMEGA_M,
                kappa0=KAPPA) -> SystemParams:
    return SystemParams(omega_m=omega_m, kappa0=kappa0, gamma_m=gamma_m,
                        g_L=g_L, g_NL=g_NL, delta=delta, E=E, n0=n0,
                        kappa_L=kappa_L)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_params(rng, bistable_ok=True, kappa_L_max=0.0) -> SystemParams:
    """Log-uniform draw over physically sensible ranges."""
    omega_m = TWO_PI * 10 ** rng.uniform(4, 7)
    kappa0 = omega_m * 10 ** rng.uniform(-1.3, 0.7)
    gamma_m = kappa0 * 10 ** rng.uniform(-4, -0.3)
    g_L = rng.choice([-1, 1]) * kappa0 * 10 ** rng.uniform(-3, 1)
    g_NL = rng.choice([-1, 1]) * kappa0 * 10 ** rng.uniform(-6, -1)
    delta = rng.choice([-1, 1]) * omega_m * 10 ** rng.uniform(-1, 2)
    E = omega_m * 10 ** rng.uniform(-1, 3)
    kappa_L = (kappa0 * 10 ** rng.uniform(-3, -1)
               if (kappa_L_max > 0 and rng.random() < 0.5) else 0.0)
    return SystemParams(omega_m=omega_m, kappa0=kappa0, gamma_m=gamma_m,
                        g_L=g_L, g_NL=g_NL, delta=delta, E=E, n0=1.0,
                        kappa_L=kappa_L)
