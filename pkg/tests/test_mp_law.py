import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgeminimax.mp_law import (
    RhoLimit,
    asymptotic_risk,
    asymptotic_risk_low_dim,
    mp_cdf,
    mp_density,
    mp_expect,
    mp_stieltjes,
    mp_support,
)

from oracles import mp_atom, mp_quad, stieltjes_quad

GOLDEN = (math.sqrt(5) - 1) / 2


class TestSupport:
    @pytest.mark.parametrize("rho", [0.25, 1.0, 4.0])
    def test_edges(self, rho):
        sup = mp_support(rho)
        assert sup.a == pytest.approx((1 - math.sqrt(rho)) ** 2, abs=1e-15)
        assert sup.b == pytest.approx((1 + math.sqrt(rho)) ** 2)
        assert 0 <= sup.a < sup.b
        assert sup.point_mass_at_zero == pytest.approx(max(1 - 1 / rho, 0))

    @pytest.mark.parametrize("rho", [0.0, -1.0, math.inf, math.nan, RhoLimit.INFINITY])
    def test_bad_rho(self, rho):
        with pytest.raises(ValueError):
            mp_support(rho)


class TestDensity:
    def test_midpoint_rho_one(self):
        assert mp_density(1.0, 2.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)

    def test_outside_support(self):
        assert mp_density(0.25, 0.1) == 0.0
        assert mp_density(0.25, 10.0) == 0.0
        assert mp_density(2.0, 0.0) == 0.0

    def test_vectorized(self):
        z = np.linspace(-1, 5, 61)
        v = mp_density(1.0, z)
        assert v.shape == z.shape
        assert np.all(v >= 0)

    @pytest.mark.parametrize("rho", [0.1, 0.5, 1.0, 2.0, 10.0])
    def test_total_mass(self, rho):
        mass = mp_quad(rho, lambda z: 1.0) + mp_atom(rho)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_errors(self):
        with pytest.raises(ValueError):
            mp_density(1.0, math.nan)
        with pytest.raises(ValueError):
            mp_density(-1.0, 1.0)


class TestCdf:
    def test_atom_at_zero(self):
        assert mp_cdf(2.0, 0.0) == pytest.approx(0.5, abs=1e-15)
        assert mp_cdf(2.0, -1e-300) == 0.0

    def test_total(self):
        assert mp_cdf(0.5, mp_support(0.5).b) == 1.0
        assert mp_cdf(0.5, 100.0) == 1.0

    @pytest.mark.parametrize("rho,s", [(1.0, 2.0), (0.5, 1.0), (2.0, 3.0), (0.1, 1.05), (10.0, 12.0)])
    def test_matches_quadrature(self, rho, s):
        ref = mp_atom(rho) + mp_quad(rho, lambda z: 1.0, upper=s)
        assert mp_cdf(rho, s) == pytest.approx(ref, abs=1e-8)

    @given(st.floats(0.05, 20.0), st.floats(-1.0, 30.0), st.floats(0.0, 5.0))
    def test_monotone(self, rho, s, ds):
        assert mp_cdf(rho, s) <= mp_cdf(rho, s + ds) + 1e-14

    def test_bad_rho(self):
        with pytest.raises(ValueError):
            mp_cdf(0.0, 1.0)


class TestStieltjes:
    def test_rho_one(self):
        assert mp_stieltjes(1.0, -1.0) == pytest.approx(GOLDEN, abs=1e-12)
        assert stieltjes_quad(1.0, -1.0) == pytest.approx(GOLDEN, abs=1e-8)

    def test_rho_two(self):
        assert mp_stieltjes(2.0, -1.0) == pytest.approx(math.sqrt(8) / 4, abs=1e-12)
        assert stieltjes_quad(2.0, -1.0) == pytest.approx(math.sqrt(8) / 4, abs=1e-8)

    @pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 7.0])
    def test_decay(self, rho):
        m = mp_stieltjes(rho, -1e8)
        assert 0 < m < 1e-7

    @pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
    def test_grid_against_quadrature(self, rho):
        for s in np.linspace(-10, -0.01, 25):
            assert abs(mp_stieltjes(rho, s) - stieltjes_quad(rho, s)) < 1e-7

    def test_library_integrator_agrees(self):
        for rho in (0.5, 2.0):
            for s in (-3.0, -0.2):
                ref = stieltjes_quad(rho, s)
                assert mp_expect(rho, lambda z: 1 / (z - s)) == pytest.approx(ref, abs=1e-10)

    @pytest.mark.parametrize("s", [0.0, 0.5, math.nan, -math.inf])
    def test_domain(self, s):
        with pytest.raises(ValueError):
            mp_stieltjes(1.0, s)

    @given(st.floats(0.01, 50.0), st.floats(-1e4, -1e-4))
    def test_positive_finite(self, rho, s):
        m = mp_stieltjes(rho, s)
        assert 0 < m < math.inf
        # m is increasing on the negative axis
        assert mp_stieltjes(rho, s * 1.5) <= m * (1 + 1e-13)


class TestAsymptoticRisk:
    def test_limits(self):
        assert asymptotic_risk(1.7, RhoLimit.INFINITY) == pytest.approx(1.7**2)
        assert asymptotic_risk(1.7, math.inf) == pytest.approx(1.7**2)
        assert asymptotic_risk(1.7, RhoLimit.ZERO) == 0.0
        assert asymptotic_risk(1.7, 0.0) == 0.0

    @pytest.mark.parametrize("rho", [0.1, 1.0, 3.0])
    def test_zero_signal(self, rho):
        assert asymptotic_risk(0.0, rho) == 0.0

    def test_spot_value(self):
        # independent route: rho * m_rho(-rho / tau^2) through the quadrature transform
        assert stieltjes_quad(1.0, -1.0) == pytest.approx(GOLDEN, abs=1e-8)
        assert asymptotic_risk(1.0, 1.0) == pytest.approx(GOLDEN, abs=1e-12)

    @pytest.mark.parametrize("tau", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
    def test_stieltjes_identity(self, tau, rho):
        lhs = asymptotic_risk(tau, rho)
        rhs = rho * mp_stieltjes(rho, -rho / tau**2)
        assert abs(lhs - rhs) < 1e-10

    def test_negative_tau(self):
        with pytest.raises(ValueError):
            asymptotic_risk(-1.0, 1.0)

    @settings(max_examples=200)
    @given(st.floats(0.0, 20.0), st.floats(0.0, 5.0), st.floats(1e-3, 50.0), st.floats(0.0, 5.0))
    def test_monotone(self, tau, dtau, rho, drho):
        r = asymptotic_risk(tau, rho)
        assert asymptotic_risk(tau + dtau, rho) >= r * (1 - 1e-12) - 1e-15
        assert asymptotic_risk(tau, rho + drho) >= r * (1 - 1e-12) - 1e-15
        assert 0.0 <= r <= tau * tau * (1 + 1e-12)

    @pytest.mark.parametrize("tau", [0.5, 1.0, 3.0])
    def test_low_dim_limit(self, tau):
        ratio = asymptotic_risk(tau, 1e-4) / asymptotic_risk_low_dim(tau, 1e-4)
        assert ratio == pytest.approx(1.0, abs=1e-2)

    def test_high_dim_limit(self):
        assert asymptotic_risk(1.3, 1e8) == pytest.approx(1.69, rel=1e-6)


class TestLowDimRisk:
    def test_values(self):
        assert asymptotic_risk_low_dim(1.0, 1.0) == 0.5
        # harmonic-mean form: 1 / (1/rho + 1/tau^2)
        assert asymptotic_risk_low_dim(2.0, 0.3) == pytest.approx(1 / (1 / 0.3 + 1 / 4.0))
        assert asymptotic_risk_low_dim(1.0, 0.0) == 0.0
        assert asymptotic_risk_low_dim(0.0, 0.0) == 0.0

    def test_saturation(self):
        assert asymptotic_risk_low_dim(1e6, 0.3) == pytest.approx(0.3, abs=1e-6)

    @pytest.mark.parametrize("tau,rho", [(-1.0, 1.0), (1.0, -0.1)])
    def test_errors(self, tau, rho):
        with pytest.raises(ValueError):
            asymptotic_risk_low_dim(tau, rho)
