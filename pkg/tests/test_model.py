"""Closed-form layer: parameters, coefficients, critical points, regions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicke_trimer import (
    ModelParams,
    ParameterError,
    alpha_from_x,
    classify_region,
    coefficients,
    critical_couplings,
    dividing_curve,
    first_order_point,
    hopping_matrix,
    x_from_alpha,
)
from dicke_trimer.model import REGION_SEQUENCES, b_tilde, c_tilde

finite_J = st.floats(min_value=-0.49, max_value=0.49)
finite_g = st.floats(min_value=0.05, max_value=3.0)


class TestModelParams:
    def test_defaults(self):
        p = ModelParams(g=1.0)
        assert p.J1 == 0.0 and p.J2 == 0.0
        assert p.omega == 1.0 and p.Omega == 1.0

    def test_lam_rescaling(self):
        p = ModelParams(g=1.2, omega=2.0, Omega=0.5)
        assert p.lam == pytest.approx(0.5 * 1.2 * math.sqrt(1.0))
        assert p.Jbar1 == 0.0

    @pytest.mark.parametrize("bad", [0.5, -0.5, 0.7, -1.0])
    def test_hopping_domain_is_open(self, bad):
        with pytest.raises(ParameterError):
            ModelParams(g=1.0, J1=bad)
        with pytest.raises(ParameterError):
            ModelParams(g=1.0, J2=bad)

    def test_negative_g_rejected(self):
        with pytest.raises(ParameterError):
            ModelParams(g=-0.1)

    def test_nonpositive_frequencies_rejected(self):
        with pytest.raises(ParameterError):
            ModelParams(g=1.0, omega=0.0)
        with pytest.raises(ParameterError):
            ModelParams(g=1.0, Omega=-1.0)

    def test_replace(self):
        p = ModelParams(g=1.0, J1=0.1)
        q = p.replace(g=2.0)
        assert q.g == 2.0 and q.J1 == 0.1 and p.g == 1.0


class TestCoefficients:
    def test_known_values(self):
        # C at J1=0.1: 1.1/((-0.9)*1.2); B at (0.1, -0.1, g=1)
        assert c_tilde(0.1) == pytest.approx(1.1 / (-0.9 * 1.2))
        p = ModelParams(g=1.0, J1=0.1, J2=-0.1)
        assert b_tilde(p) == pytest.approx(0.1 / 1.08 - 0.1, abs=1e-15)

    def test_c_tilde_negative_on_domain(self):
        for J1 in np.linspace(-0.49, 0.49, 99):
            assert c_tilde(J1) < 0.0

    def test_g_zero_rejected(self):
        with pytest.raises(ParameterError):
            coefficients(ModelParams(g=0.0, J2=0.1))

    @given(finite_J, finite_J, finite_g)
    def test_b_sign_flips_at_first_order_point(self, J1, J2, g):
        if abs(J1) < 1e-3 or abs(J2) < 1e-3:  # g_L diverges as J1 -> 0
            return
        p = ModelParams(g=g, J1=J1, J2=J2)
        gL = first_order_point(p)
        if gL is None:
            return
        assert b_tilde(p.replace(g=gL)) == pytest.approx(0.0, abs=1e-12)
        assert b_tilde(p.replace(g=gL * 0.9)) * b_tilde(p.replace(g=gL * 1.1)) < 0.0


class TestVariableMap:
    def test_matrix_structure(self):
        S = hopping_matrix(0.2)
        assert np.allclose(np.diag(S), 1.0)
        assert S[0, 1] == S[1, 2] == 0.2

    @given(finite_J, st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3))
    @settings(max_examples=200)
    def test_round_trip(self, J1, alpha):
        p = ModelParams(g=1.0, J1=J1)
        alpha = np.array(alpha)
        assert np.allclose(alpha_from_x(x_from_alpha(alpha, p), p), alpha, atol=1e-12)

    def test_inverse_matches_matrix_inverse(self):
        p = ModelParams(g=1.0, J1=0.3)
        x = np.array([0.2, -0.1, 0.05])
        assert np.allclose(
            alpha_from_x(x, p), np.linalg.solve(hopping_matrix(0.3), x), atol=1e-14
        )


class TestCriticalCouplings:
    def test_closed_forms(self):
        cc = critical_couplings(ModelParams(g=1.0, J1=0.1, J2=-0.1))
        assert cc.g_c_plus == pytest.approx(math.sqrt(0.9 * 1.1))
        assert cc.g_c_minus == pytest.approx(math.sqrt(1.2 * 0.8))
        assert cc.g_c == cc.g_c_minus
        assert cc.k_star == 0.0

    def test_finite_momentum_side(self):
        cc = critical_couplings(ModelParams(g=1.0, J1=0.1, J2=0.1))
        assert cc.g_c == cc.g_c_plus == pytest.approx(0.9)
        assert cc.k_star == pytest.approx(2.0 * math.pi / 3.0)

    def test_uncoupled_limit(self):
        cc = critical_couplings(ModelParams(g=1.0))
        assert cc.g_c_plus == cc.g_c_minus == cc.g_c == 1.0

    @given(st.floats(-0.45, 0.45))
    def test_branches_coincide_on_dividing_curve(self, J2):
        J1 = dividing_curve(J2)
        if not -0.5 < J1 < 0.5:
            return
        cc = critical_couplings(ModelParams(g=1.0, J1=J1, J2=J2))
        assert cc.g_c_plus == pytest.approx(cc.g_c_minus, abs=1e-12)


class TestFirstOrderPoint:
    def test_reference_value(self):
        gL = first_order_point(ModelParams(g=1.0, J1=0.1, J2=-0.1))
        assert gL == pytest.approx(math.sqrt(1.08))

    def test_absent_for_same_sign_hoppings(self):
        assert first_order_point(ModelParams(g=1.0, J1=0.1, J2=0.1)) is None
        assert first_order_point(ModelParams(g=1.0, J1=-0.1, J2=-0.1)) is None
        assert first_order_point(ModelParams(g=1.0, J1=0.0, J2=0.3)) is None

    def test_coincides_with_critical_point_on_curve(self):
        # on the dividing curve the first-order point lands exactly on g_c
        J2 = -0.0909090909090909
        J1 = dividing_curve(J2)
        p = ModelParams(g=1.0, J1=J1, J2=J2)
        cc = critical_couplings(p)
        assert first_order_point(p) == pytest.approx(cc.g_c, abs=1e-12)


class TestRegions:
    SAMPLES = {
        1: (0.3, -0.1), 2: (0.1, 0.1), 3: (-0.1, 0.3),
        4: (-0.3, 0.3), 5: (-0.1, -0.1), 6: (0.1, -0.1),
    }

    @pytest.mark.parametrize("region,point", sorted(SAMPLES.items()))
    def test_interior_samples(self, region, point):
        label = classify_region(*point)
        assert label.region == region
        assert not label.boundary
        assert label.expected_sequence == REGION_SEQUENCES[region]

    def test_axis_boundary(self):
        label = classify_region(0.0, 0.2)
        assert label.boundary and label.region is None
        assert label.adjacent == (2, 3)

    def test_curve_boundary(self):
        J2 = 0.2
        label = classify_region(dividing_curve(J2), J2)
        assert label.boundary
        assert label.adjacent == (3, 4)

    def test_origin_touches_all_regions_present(self):
        label = classify_region(0.0, 0.0)
        assert label.boundary
        assert set(label.adjacent) == {1, 2, 5, 6} or len(label.adjacent) >= 2

    def test_out_of_domain(self):
        with pytest.raises(ParameterError):
            classify_region(0.6, 0.0)
