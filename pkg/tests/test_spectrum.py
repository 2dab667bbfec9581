import numpy as np
import pytest
from dataclasses import replace
from numpy.testing import assert_allclose
from scipy.constants import k as k_B, hbar

from kerrmech import (absorption_spectrum, bath_temperature, default_nu_grid,
                      effective_susceptibility, enumerate_states, find_peaks,
                      radiation_pressure_spectrum, spectrum_point,
                      spectrum_series, thermal_spectrum)
from kerrmech.spectrum import SpectrumPoint
from kerrmech.steady_state import assemble_state
import linear_reference
from conftest import KAPPA, OMEGA_M, make_params, random_params


def first_stable(params):
    for s in enumerate_states(params):
        if s.stability.is_stable:
            return s
    raise AssertionError("no stable state")


class TestThermalSpectrum:
    def test_occupation_identity_at_resonance(self):
        p = make_params(n0=1.0)
        T0 = bath_temperature(1.0, p.omega_m)
        # coth(hbar Omega / 2 k T0) = 2 n0 + 1 = 3
        assert_allclose(thermal_spectrum(p.omega_m, p, T0), 4.0 * p.gamma_m,
                        rtol=1e-12)

    def test_vacuum_bath(self):
        p = make_params(n0=0.0)
        assert_allclose(thermal_spectrum(p.omega_m, p, 0.0), 2.0 * p.gamma_m,
                        rtol=1e-14)
        assert thermal_spectrum(-p.omega_m, p, 0.0) == 0.0

    def test_low_frequency_limit(self):
        p = make_params(n0=1.0)
        T0 = bath_temperature(1.0, p.omega_m)
        limit = 2.0 * p.gamma_m * k_B * T0 / (hbar * p.omega_m)
        small = thermal_spectrum(1e-9 * p.omega_m, p, T0)
        assert_allclose(small, limit, rtol=1e-6)
        assert_allclose(thermal_spectrum(0.0, p, T0), limit, rtol=1e-12)

    def test_nonnegative(self, rng):
        p = make_params(n0=2.5)
        T0 = bath_temperature(2.5, p.omega_m)
        nu = rng.uniform(-5, 5, 200) * p.omega_m
        assert np.all(thermal_spectrum(nu, p, T0) >= 0.0)


class TestRadiationPressureSpectrum:
    def test_zero_coupling(self):
        p = make_params(E=0.2 * OMEGA_M)
        s = enumerate_states(p, classify=False)[0]
        nu = np.linspace(-2, 2, 11) * OMEGA_M
        assert np.all(radiation_pressure_spectrum(nu, s) == 0.0)

    def test_unit_substitution(self):
        # G = 1, kappa = 1, Delta(q_s) = 0, g_NL q_s = 0, nu = 0 -> S_rp = 2;
        # q_s = 0.5 here, so delta = g_L q_s zeroes the shifted detuning
        p = make_params(omega_m=1.0, kappa0=1.0, gamma_m=0.0, delta=0.5,
                        E=1.0 / np.sqrt(2.0), g_L=1.0, n0=0.0)
        s = assemble_state(0.5, p)  # n = 1/2 -> G = sqrt(2*0.5)*1 = 1
        assert_allclose(s.G, 1.0, rtol=1e-12)
        assert_allclose(s.delta_qs, 0.0, atol=1e-15)
        assert_allclose(radiation_pressure_spectrum(0.0, s), 2.0, rtol=1e-10)

    def test_nonnegative(self, rng):
        for _ in range(30):
            p = random_params(rng)
            for s in enumerate_states(p, classify=False):
                nu = np.linspace(-3, 3, 101) * p.omega_m
                assert np.all(radiation_pressure_spectrum(nu, s) >= 0.0)


class TestAbsorptionSpectrum:
    def test_zero_without_position_dependence(self):
        p = make_params(g_L=0.1 * KAPPA, E=OMEGA_M)
        s = enumerate_states(p, classify=False)[0]
        nu = np.linspace(0.2, 1.8, 7) * OMEGA_M
        assert np.all(absorption_spectrum(nu, s, p) == 0.0)

    def test_constant_part_without_optical_coupling(self):
        # kappa_L > 0 with g_L = g_NL = 0 keeps q_s = 0 only for E = 0;
        # use a crafted state with G = 0 via g_L = -2 g_NL n_s
        p = make_params(g_L=-0.2 * KAPPA, g_NL=0.01 * KAPPA,
                        kappa_L=0.013 * KAPPA, E=OMEGA_M)
        s = assemble_state(10.0, p)  # G = sqrt(20)(-0.2+0.2) kap = 0
        assert abs(s.G) < 1e-12 * KAPPA
        assert s.q_s < 0 or s.q_s > 0
        if s.q_s > 0:
            nu = np.linspace(0.2, 1.8, 7) * OMEGA_M
            vals = absorption_spectrum(nu, s, p)
            assert_allclose(vals, s.Gamma**2 / (2 * p.kappa_L * s.q_s),
                            rtol=1e-12)

    def test_nonzero_and_frequency_dependent(self):
        p = make_params(g_L=0.1 * KAPPA, kappa_L=0.0130 * KAPPA, E=2 * OMEGA_M)
        s = enumerate_states(p, classify=False)[0]
        nu = np.linspace(0.2, 1.8, 101) * OMEGA_M
        vals = absorption_spectrum(nu, s, p)
        assert np.any(vals != 0.0)
        assert np.ptp(vals) > 0.0


class TestEffectiveSusceptibility:
    def test_decoupled_oscillator(self):
        p = make_params(omega_m=1.0, kappa0=1.0, gamma_m=0.1, delta=1.0,
                        E=0.0, n0=0.0)
        s = assemble_state(0.0, p)
        chi_sq, omega_eff, gamma_eff = effective_susceptibility(1.0, s, p)
        assert_allclose(omega_eff, 1.0, rtol=1e-14)
        assert_allclose(gamma_eff, 0.1, rtol=1e-14)
        assert_allclose(chi_sq, 100.0, rtol=1e-12)

    def test_decoupled_static_response(self):
        p = make_params(omega_m=2.0, kappa0=1.0, gamma_m=0.1, delta=1.0,
                        E=0.0, n0=0.0)
        s = assemble_state(0.0, p)
        chi_sq, _, _ = effective_susceptibility(0.0, s, p)
        assert_allclose(chi_sq, 1.0 / p.omega_m**2, rtol=1e-14)

    def test_inverse_consistency(self, rng):
        for _ in range(30):
            p = random_params(rng)
            for s in enumerate_states(p, classify=False):
                nu = rng.uniform(0.1, 3.0) * p.omega_m
                chi_sq, omega_eff, gamma_eff = effective_susceptibility(nu, s, p)
                omega_eff_sq = np.sign(omega_eff) * omega_eff**2
                rebuilt = ((omega_eff_sq - nu**2) / p.omega_m)**2 \
                    + nu**2 * gamma_eff**2
                assert_allclose(chi_sq * rebuilt, 1.0, rtol=1e-12)


class TestSpectrumComposition:
    def test_decoupled_thermal_peak(self):
        p = make_params(E=0.2 * OMEGA_M, n0=1.0)
        s = first_stable(p)
        series = spectrum_series(default_nu_grid(OMEGA_M), s, p)
        peaks = find_peaks(series)
        assert len(peaks) == 1
        assert abs(peaks[0][0] - OMEGA_M) < 0.01 * OMEGA_M

    def test_strong_coupling_splitting_vs_linear(self):
        grid = default_nu_grid(OMEGA_M)
        p = make_params(g_L=0.1 * KAPPA, g_NL=0.01 * KAPPA, E=3.8 * OMEGA_M)
        s = first_stable(p)
        peaks = find_peaks(spectrum_series(grid, s, p))
        assert len(peaks) == 2
        p_lin = replace(p, g_NL=0.0)
        s_lin = first_stable(p_lin)
        peaks_lin = find_peaks(spectrum_series(grid, s_lin, p_lin))
        assert len(peaks_lin) == 1

    def test_peaks_match_dressed_frequencies(self):
        # peak abscissas sit a linewidth-squared pull away from |Im(lambda)|;
        # at this operating point the decay rates are ~0.05 Omega_m
        grid = default_nu_grid(OMEGA_M)
        p = make_params(g_L=0.1 * KAPPA, g_NL=0.01 * KAPPA, E=3.8 * OMEGA_M)
        s = first_stable(p)
        peaks = find_peaks(spectrum_series(grid, s, p))
        dressed = s.stability.dressed_frequencies
        assert len(peaks) == len(dressed) == 2
        for (nu_pk, _), nu_eig in zip(peaks, dressed):
            assert abs(nu_pk - nu_eig) < 0.025 * OMEGA_M

    def test_total_is_chi_times_components(self, rng):
        p = random_params(rng)
        for s in enumerate_states(p, classify=False):
            pt = spectrum_point(1.3 * p.omega_m, s, p)
            assert_allclose(pt.s_total,
                            pt.chi_eff_sq * (pt.s_thermal + pt.s_rp + pt.s_abs),
                            rtol=1e-14)

    def test_series_preserves_grid_order(self):
        p = make_params(E=0.2 * OMEGA_M)
        s = first_stable(p)
        grid = np.array([1.3, 0.7, 1.0]) * OMEGA_M
        series = spectrum_series(grid, s, p)
        assert [pt.nu for pt in series] == list(grid)

    def test_unstable_state_warns(self):
        p = make_params(g_L=0.1 * KAPPA, g_NL=0.01 * KAPPA, E=4.0 * OMEGA_M)
        s = enumerate_states(p)[0]
        assert not s.stability.is_stable
        with pytest.warns(UserWarning):
            spectrum_point(OMEGA_M, s, p)

    def test_linear_reduction_matches_reference(self, rng):
        grid = np.linspace(0.05, 3.0, 1000) * OMEGA_M
        for _ in range(20):
            p = replace(random_params(rng), g_NL=0.0, kappa_L=0.0,
                        omega_m=OMEGA_M)
            states = enumerate_states(p, classify=False)
            T0 = bath_temperature(p.n0, p.omega_m)
            for s in states:
                if s.n_s == 0.0:
                    continue
                mine = np.array([pt.s_total
                                 for pt in spectrum_series(grid, s, p, T0=T0)])
                ref = linear_reference.spectrum(grid, p, s.n_s, s.q_s, T0)
                assert_allclose(mine, ref, rtol=1e-12)

    def test_weak_coupling_area_recovers_position_variance(self):
        # (1/2pi) integral of S over a wide grid ~ V11 = n0 + 1/2
        p = make_params(g_L=1e-4 * KAPPA, E=0.05 * OMEGA_M, n0=1.0,
                        gamma_m=0.02 * OMEGA_M)
        s = first_stable(p)
        nu = np.linspace(-5.0, 5.0, 400001) * OMEGA_M
        series_total = np.array(
            [pt.s_total for pt in spectrum_series(nu, s, p)])
        area = np.trapezoid(series_total, nu) / (2.0 * np.pi)
        assert abs(area - 1.5) / 1.5 < 0.02


class TestFindPeaks:
    def test_single_lorentzian_center(self):
        nu = np.linspace(0.0, 2.0, 401)
        s = 1.0 / ((nu - 1.0)**2 + 0.01)
        series = [SpectrumPoint(nu=x, s_total=y, s_thermal=0, s_rp=0,
                                s_abs=0, chi_eff_sq=0, omega_eff=0,
                                gamma_eff=0) for x, y in zip(nu, s)]
        peaks = find_peaks(series)
        assert len(peaks) == 1
        assert abs(peaks[0][0] - 1.0) <= 0.5 * (nu[1] - nu[0])

    def test_two_lorentzians(self):
        nu = np.linspace(0.0, 3.0, 601)
        s = 1.0 / ((nu - 1.0)**2 + 0.005) + 1.0 / ((nu - 2.0)**2 + 0.005)
        series = [SpectrumPoint(nu=x, s_total=y, s_thermal=0, s_rp=0,
                                s_abs=0, chi_eff_sq=0, omega_eff=0,
                                gamma_eff=0) for x, y in zip(nu, s)]
        peaks = find_peaks(series)
        assert len(peaks) == 2
        assert abs(peaks[0][0] - 1.0) < 0.01
        assert abs(peaks[1][0] - 2.0) < 0.01

    def test_too_short_series_rejected(self):
        with pytest.raises(ValueError):
            find_peaks([])


def test_delta_prime_factorization_everywhere(rng):
    for _ in range(100):
        p = random_params(rng)
        for s in enumerate_states(p, classify=False):
            assert_allclose(s.delta_prime_sq, s.delta_small * s.delta_y,
                            rtol=1e-12, atol=1e-300)
