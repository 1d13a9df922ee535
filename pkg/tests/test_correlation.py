"""Correlation curve shape, the maximizing chi, and its limiting value."""

import math

import numpy as np
import pytest

from guardzone import correlation
from guardzone.params import ModelParams, derive
from guardzone.single_obs import evidence_success, posterior, prior_success

FIG1 = ModelParams(n=2, density=2e-4, alpha=3, beta=5, r_T=10)


def rho_oracle(p, chi):
    """Correlation assembled from first principles: the Pearson formula on
    the joint Bernoulli distribution of (physical, protocol) success."""
    d = derive(p)
    r_O = (chi * d.sigma) ** (1.0 / d.alpha)
    pH = prior_success(p)
    pD = evidence_success(p, r_O)
    pHD = posterior(p, r_O).p_h1_d1 * pD
    return (pHD - pH * pD) / math.sqrt(pH * (1 - pH) * pD * (1 - pD))


class TestRho:
    @pytest.mark.parametrize("chi", [1e-3, 0.3, 1.0, 2.08, 15.0, 1e3])
    def test_matches_first_principles(self, chi):
        assert correlation.rho(FIG1, chi) == pytest.approx(
            rho_oracle(FIG1, chi), rel=1e-9)

    def test_positive_association(self):
        grid = np.geomspace(1e-3, 1e4, 60)
        assert all(correlation.rho(FIG1, c) > 0 for c in grid)

    def test_vanishes_at_extremes(self):
        assert correlation.rho(FIG1, 1e-9) < 1e-3
        assert correlation.rho(FIG1, 1e12) < 1e-3

    def test_curve_wrapper(self):
        grid = np.geomspace(0.1, 10, 20)
        curve = correlation.rho_curve(FIG1, grid)
        assert len(curve.rho_values) == 20
        assert curve.rho_values[5] == correlation.rho(FIG1, grid[5])


class TestChiStar:
    def test_fig1_value(self):
        assert correlation.chi_star(FIG1) == pytest.approx(2.08, abs=0.02)

    def test_crossing_characterization(self):
        cs = correlation.chi_star(FIG1)
        assert correlation.f1(FIG1, cs) == pytest.approx(
            correlation.f2(FIG1, cs), rel=1e-9)

    def test_is_global_max_on_grid(self):
        cs = correlation.chi_star(FIG1)
        peak = correlation.rho(FIG1, cs)
        grid = np.geomspace(1e-3, 1e4, 500)
        assert all(correlation.rho(FIG1, c) <= peak + 1e-12 for c in grid)

    def test_stationary_by_finite_difference(self):
        cs = correlation.chi_star(FIG1)
        h = 1e-6 * cs
        deriv = (correlation.rho(FIG1, cs + h)
                 - correlation.rho(FIG1, cs - h)) / (2 * h)
        assert abs(deriv) < 1e-8

    def test_exceeds_unit_chi(self):
        # the maximizer always lies beyond the matched radius chi = 1
        for scale in (0.25, 1.0, 4.0):
            p = ModelParams(n=2, density=2e-4 * scale, alpha=3, beta=5, r_T=10)
            assert correlation.chi_star(p) > 1.0


class TestLowDensityLimit:
    @pytest.mark.parametrize("delta", [1 / 3, 0.5, 2 / 3])
    def test_coeff_to_zero_converges(self, delta):
        limit = correlation.chi_star_low_density_limit(delta)
        assert correlation.chi_star_from_coeff(1e-8, delta) == pytest.approx(
            limit, rel=1e-4)

    def test_limit_solves_defining_equation(self):
        from guardzone import specfn
        for delta in (1 / 3, 0.5, 2 / 3):
            chi = correlation.chi_star_low_density_limit(delta)
            lhs = specfn.int_I(chi, delta)
            rhs = (chi - 1) / (chi + 1) * chi**delta
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_sweep_monotone_in_coeff(self):
        # chi_star decreases toward its low-density limit as the scale grows?
        # No ordering is claimed in general; just check continuity of the sweep.
        vals = [correlation.chi_star_from_coeff(a, 2 / 3)
                for a in np.geomspace(1e-4, 1.0, 30)]
        diffs = np.abs(np.diff(vals))
        assert np.max(diffs) < 0.5
