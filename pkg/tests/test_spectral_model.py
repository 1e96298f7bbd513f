import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisotex.spectral_model import (ElementaryParams, Window, angle_distance, cone_weight,
                                     covariance, covariance_matrix_points, gamma_factor,
                                     reduce_angle, variogram)

STRIPES = ElementaryParams(0.2, math.pi / 6, 1e-2)

# pi / (2 H Gamma(2H) sin(H pi)) evaluated with mpmath at 30 digits
GAMMA_02 = 6.023909185905070511706116387
GAMMA_07 = 3.12616157743013242977988813603


def riemann_variogram(hurst, alpha0, alpha, x, nodes=10**6):
    """Midpoint rule over the indicator cone; gamma(H) from the closed form above."""
    g = math.pi / (2 * hurst * math.gamma(2 * hurst) * math.sin(hurst * math.pi))
    h = 2 * alpha / nodes
    th = alpha0 - alpha + (np.arange(nodes) + 0.5) * h
    return g * h * np.sum(np.abs(x[0] * np.cos(th) + x[1] * np.sin(th)) ** (2 * hurst))


class TestParams:
    def test_rejects_boundary_hurst(self):
        for h in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                ElementaryParams(h, 0.0, 0.1)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            ElementaryParams(0.5, 0.0, 0.0)
        with pytest.raises(ValueError):
            ElementaryParams(0.5, 0.0, math.pi / 2 + 1e-9)

    def test_alpha0_canonical(self):
        assert ElementaryParams(0.5, -math.pi / 2, 0.1).alpha0 == pytest.approx(math.pi / 2)
        assert ElementaryParams(0.5, math.pi / 2, 0.1).alpha0 == pytest.approx(math.pi / 2)
        assert ElementaryParams(0.5, 0.3 + math.pi, 0.1).alpha0 == pytest.approx(0.3)

    def test_window_from_string(self):
        assert ElementaryParams(0.5, 0, 0.1, "gauss").window is Window.GAUSS


def test_reduce_angle_range():
    t = np.linspace(-10, 10, 10001)
    r = reduce_angle(t)
    assert np.all(r > -math.pi / 2) and np.all(r <= math.pi / 2)
    assert np.allclose(np.cos(2 * r), np.cos(2 * t))


def test_angle_distance_symmetric_and_periodic():
    assert angle_distance(0.3, 1.1) == pytest.approx(angle_distance(1.1, 0.3))
    assert angle_distance(0.4, 0.4 + math.pi) == pytest.approx(0.0, abs=1e-15)


class TestGammaFactor:
    def test_half(self):
        assert gamma_factor(0.5) == pytest.approx(math.pi, rel=1e-15)

    @pytest.mark.parametrize("h, expected", [(0.2, GAMMA_02), (0.7, GAMMA_07)])
    def test_against_mpmath(self, h, expected):
        assert gamma_factor(h) == pytest.approx(expected, rel=1e-13)

    def test_continuous_at_half(self):
        assert gamma_factor(0.5 - 1e-6) == pytest.approx(3.14159531003468956813406944339, rel=1e-12)
        assert gamma_factor(0.5 + 1e-6) == pytest.approx(3.14158999717004475345052334194, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            gamma_factor(1.0)

    def test_positive_on_interval(self):
        hs = np.random.default_rng(0).uniform(0.01, 0.99, 1000)
        assert all(gamma_factor(h) > 0 and math.isfinite(gamma_factor(h)) for h in hs)


class TestConeWeight:
    @pytest.mark.parametrize("window", list(Window))
    def test_on_axis_and_periodic(self, window):
        p = ElementaryParams(0.3, 0.7, 0.2, window)
        assert cone_weight(p, p.alpha0) == 1.0
        assert cone_weight(p, p.alpha0 + math.pi) == pytest.approx(1.0, abs=1e-15)

    def test_indicator_boundary_closed(self):
        p = ElementaryParams(0.3, 0.0, 0.25)
        assert cone_weight(p, 0.25) == 1.0
        assert cone_weight(p, -0.25) == 1.0
        assert cone_weight(p, 0.2500001) == 0.0

    def test_gauss_shape_and_truncation(self):
        p = ElementaryParams(0.3, 0.0, 0.1, "gauss")
        assert cone_weight(p, 0.1) == pytest.approx(math.exp(-0.5))
        assert cone_weight(p, 0.2999) > 0
        assert cone_weight(p, 0.3001) == 0.0

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-20, 20), st.sampled_from(list(Window)))
    def test_pi_periodic(self, theta, window):
        # theta and theta + pi round differently, so equality holds to a few ulps
        p = ElementaryParams(0.4, 0.3, 0.2, window)
        assert abs(cone_weight(p, theta) - cone_weight(p, theta + math.pi)) <= 1e-12 or \
            abs(angle_distance(theta, p.alpha0) - p.support) < 1e-12


class TestVariogram:
    def test_origin(self):
        assert variogram(STRIPES, (0, 0)) == 0.0

    def test_isotropic_half(self):
        p = ElementaryParams(0.5, 0.0, math.pi / 2)
        assert variogram(p, (1, 0)) == pytest.approx(2 * math.pi, abs=1e-9)

    def test_stripe_config_against_riemann(self):
        expected = riemann_variogram(0.2, math.pi / 6, 1e-2, (1.0, 0.0))
        assert abs(expected - 0.11374103868783204) < 1e-12
        assert variogram(STRIPES, (1, 0)) == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("window", list(Window))
    def test_even(self, window):
        p = ElementaryParams(0.35, 1.2, 0.4, window)
        rng = np.random.default_rng(1)
        for x in rng.normal(size=(20, 2)):
            assert variogram(p, x) == pytest.approx(variogram(p, -x), abs=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(lam=st.floats(0.1, 2.0), h=st.floats(0.05, 0.95),
           x=st.tuples(st.floats(-1, 1), st.floats(-1, 1)).filter(lambda v: math.hypot(*v) > 1e-3),
           window=st.sampled_from(list(Window)))
    def test_homogeneity(self, lam, h, x, window):
        p = ElementaryParams(h, 0.4, 0.3, window)
        v1 = variogram(p, (lam * x[0], lam * x[1]))
        v0 = variogram(p, x)
        assert v1 == pytest.approx(lam ** (2 * h) * v0, rel=1e-8)

    @settings(max_examples=60, deadline=None)
    @given(delta=st.floats(-3, 3), a0=st.floats(-1.5, 1.5), phi=st.floats(-3, 3))
    def test_rotation_covariance(self, delta, a0, phi):
        p = ElementaryParams(0.3, a0, 0.35)
        q = p.with_alpha0(a0 + delta)
        x = (math.cos(phi), math.sin(phi))
        xr = (math.cos(phi + delta), math.sin(phi + delta))
        assert variogram(q, xr) == pytest.approx(variogram(p, x), abs=1e-9)

    def test_full_cone_is_isotropic(self):
        p = ElementaryParams(0.7, 0.3, math.pi / 2)
        vals = [variogram(p, (math.cos(t), math.sin(t))) for t in np.linspace(0, math.pi, 7)]
        assert np.ptp(vals) < 1e-9


class TestCovariance:
    def test_pinned_origin(self):
        assert covariance(STRIPES, (0.3, 0.8), (0, 0)) == 0.0

    def test_variance(self):
        x = (0.4, -0.2)
        assert covariance(STRIPES, x, x) == 2 * variogram(STRIPES, x)

    def test_symmetric(self):
        p = ElementaryParams(0.6, -0.4, 0.5, "gauss")
        x, y = (0.3, 0.9), (0.7, 0.1)
        assert covariance(p, x, y) == covariance(p, y, x)

    def test_stripe_config_against_riemann(self):
        v = lambda x: riemann_variogram(0.2, math.pi / 6, 1e-2, x)
        expected = v((0.5, 0)) + v((0, 0.5)) - v((0.5, -0.5))
        assert abs(expected - 0.0943183896374937) < 1e-12
        assert covariance(STRIPES, (0.5, 0), (0, 0.5)) == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("params", [STRIPES, ElementaryParams(0.7, 0.2, 0.3),
                                        ElementaryParams(0.2, -1.0, 0.1, "gauss"),
                                        ElementaryParams(0.5, 0.0, math.pi / 2)])
    def test_psd_on_random_sets(self, params):
        rng = np.random.default_rng(5)
        for _ in range(5):
            sigma = covariance_matrix_points(params, rng.uniform(0, 1, (20, 2)))
            assert np.array_equal(sigma, sigma.T)
            assert np.linalg.eigvalsh(sigma).min() >= -1e-8 * np.trace(sigma)
