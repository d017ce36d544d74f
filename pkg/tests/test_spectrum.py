"""Fluctuation spectrum: quadratic form, symplectic eigenvalues, exponents."""

import math

import numpy as np
import pytest

from dicke_trimer import (
    ModelParams,
    analytic_np_spectrum,
    build_quadratic,
    critical_couplings,
    fit_critical_exponent,
    solve_ground_state,
    soft_mode_gap,
    state_from_x,
    symplectic_eigenvalues,
)
from dicke_trimer.spectrum import (
    UnstableBackgroundError,
    fit_power_law,
    symplectic_form,
)


def np_spectrum_numeric(params):
    bg = state_from_x(np.zeros(3), params)
    return symplectic_eigenvalues(build_quadratic(bg, params))


class TestQuadraticForm:
    def test_symmetric(self):
        p = ModelParams(g=0.8, J1=0.1, J2=-0.2)
        M = build_quadratic(state_from_x(np.zeros(3), p), p).M
        assert np.allclose(M, M.T)

    def test_rejects_nonstationary_background(self):
        p = ModelParams(g=0.8, J1=0.1, J2=0.1)
        with pytest.raises(ValueError, match="stationary"):
            build_quadratic(state_from_x(np.array([0.1, 0.0, 0.0]), p), p)

    def test_symplectic_form_squares_to_minus_one(self):
        J = symplectic_form()
        assert np.allclose(J @ J, -np.eye(12))


class TestNormalPhaseSpectrum:
    def test_uncoupled_zero_g_limit(self):
        # at g=0 and no hopping the six energies are three omega, three Omega
        res = analytic_np_spectrum(ModelParams(g=0.0, omega=1.0, Omega=2.0))
        assert np.allclose(np.sort(res.energies), [1.0, 1.0, 1.0, 2.0, 2.0, 2.0])

    def test_matches_numeric_route(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            J1, J2 = rng.uniform(-0.45, 0.45, 2)
            p0 = ModelParams(g=1.0, J1=J1, J2=J2,
                             omega=rng.uniform(0.5, 2.0),
                             Omega=rng.uniform(0.5, 2.0))
            cc = critical_couplings(p0)
            p = p0.replace(g=rng.uniform(0.1, 0.99) * cc.g_c)
            assert np.allclose(np_spectrum_numeric(p).energies,
                               analytic_np_spectrum(p).energies, atol=1e-10)

    def test_finite_momentum_degeneracy(self):
        res = analytic_np_spectrum(ModelParams(g=0.5, J1=0.2, J2=-0.1))
        ks = [abs(k) for k, _ in res.momentum_labels]
        # +-2pi/3 labels appear in degenerate pairs
        assert ks.count(2.0 * math.pi / 3.0) == 4

    def test_gap_closes_at_critical_point(self):
        p = ModelParams(g=1.0, J1=0.1, J2=0.1)
        cc = critical_couplings(p)
        res = analytic_np_spectrum(p.replace(g=cc.g_c))
        assert res.soft_mode_gap == pytest.approx(0.0, abs=1e-7)
        assert res.critical

    def test_soft_momentum_matches_k_star(self):
        for J1, J2 in ((0.1, 0.1), (-0.1, -0.1)):
            p = ModelParams(g=1.0, J1=J1, J2=J2)
            cc = critical_couplings(p)
            res = analytic_np_spectrum(p.replace(g=0.999 * cc.g_c))
            k_soft, _ = res.momentum_labels[0]
            assert abs(k_soft) == pytest.approx(cc.k_star)

    def test_rejects_supercritical(self):
        p = ModelParams(g=1.3, J1=0.1, J2=0.1)
        with pytest.raises(ValueError, match="criticality"):
            analytic_np_spectrum(p)


class TestOrderedPhaseSpectra:
    def test_nsp_background_stable(self):
        p = ModelParams(g=1.2, J1=-0.1, J2=-0.1)
        gap = soft_mode_gap(p)
        assert gap > 0.0

    def test_fsp_background_stable(self):
        p = ModelParams(g=1.2, J1=0.1, J2=0.1)
        gap = soft_mode_gap(p)
        assert gap > 0.0

    def test_fsp_past_first_order_point_stable(self):
        # fold-born frustrated minimum: spectrum must still be positive
        p = ModelParams(g=1.05, J1=0.1, J2=-0.1)
        res = solve_ground_state(p)
        spec = symplectic_eigenvalues(build_quadratic(res.representative, p))
        assert spec.energies[0] > 0.0

    def test_wrong_phase_raises(self):
        # the normal phase is unstable above g_c
        p = ModelParams(g=1.3, J1=0.1, J2=0.1)
        with pytest.raises(UnstableBackgroundError):
            symplectic_eigenvalues(build_quadratic(state_from_x(np.zeros(3), p), p))


class TestPowerLawFits:
    def test_fit_power_law_exact(self):
        dg = np.geomspace(1e-6, 1e-3, 11)
        fit = fit_power_law(dg, 3.0 * dg**0.75)
        assert fit.exponent == pytest.approx(0.75, abs=1e-12)
        assert fit.prefactor == pytest.approx(3.0)
        assert fit.r_squared == pytest.approx(1.0)

    def test_np_side_exponent_half(self):
        fit = fit_critical_exponent(ModelParams(g=1.0, J1=0.1, J2=0.1), "below")
        assert fit.exponent == pytest.approx(0.5, abs=0.02)

    def test_nsp_side_exponent_half(self):
        fit = fit_critical_exponent(ModelParams(g=1.0, J1=-0.1, J2=-0.1), "above")
        assert fit.exponent == pytest.approx(0.5, abs=0.02)

    def test_fsp_side_exponent_one(self):
        fit = fit_critical_exponent(ModelParams(g=1.0, J1=0.1, J2=0.1), "above")
        assert fit.exponent == pytest.approx(1.0, abs=0.05)

    def test_window_crossing_first_order_point_rejected(self):
        p = ModelParams(g=1.0, J1=0.1, J2=-0.1)
        gL = 1.0392304845413265
        with pytest.raises(ValueError, match="first-order"):
            fit_critical_exponent(p, "below", g_crit=gL + 1e-4, window=(1e-6, 1e-3))
