import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from stochord.baseline import GLFR, BurrPower, LomaxPower
from stochord.portfolio import (DomainError, Portfolio, PortfolioSizeError, default_grid,
                                ks_distance, kth_cdf, log_max_cdf, max_cdf, max_quantile, max_rhr,
                                reliability_lower_bound, sample_max, saturating_grid)

GLFR_REF = GLFR(1.0, 0.0, 0.5)
LOMAX = LomaxPower(5.0, 0.2)
BURR = BurrPower(5.0, 4.0)


def ex34_pair():
    p = [0.2, 0.8, 0.9]
    u = Portfolio(GLFR_REF, [1.0] * 3, [1.0, 2.5, 5.0], [2.0, 5.0, 9.0], p)
    v = Portfolio(GLFR_REF, [1.0] * 3, [0.5, 2.0, 3.0], [2.0, 5.0, 9.0], p)
    return u, v


def hetero6():
    return Portfolio(BURR, [0.5, 0.8, 1.0, 1.2, 2.0, 0.7], [0.2, 0.5, 0.1, 0.9, 0.4, 0.3],
                     [1.0, 0.6, 2.0, 1.5, 0.8, 1.2], [0.3, 0.9, 0.5, 0.7, 0.95, 0.6])


# reversed hazards of the two fixture portfolios, mpmath at 40 digits
EX34_RHR = {6.0: (0.429358405795522316, 0.180542661404939531),
            10.0: (0.0868396404384170534, 0.0612178144594076498),
            20.0: (0.0140028424106590491, 0.0110779356371919847)}


class TestPortfolio:
    def test_vectors_validated(self):
        with pytest.raises(ValueError, match="length"):
            Portfolio(BURR, [1, 1], [1], [1, 1], [0.5, 0.5])
        with pytest.raises(ValueError):
            Portfolio(BURR, [1, 1], [1, 1], [1, -1], [0.5, 0.5])
        with pytest.raises(ValueError):
            Portfolio(BURR, [1, 1], [1, 1], [1, 1], [0.5, 1.5])

    def test_vectors_read_only(self):
        pf = hetero6()
        with pytest.raises(ValueError):
            pf.lam[0] = 3.0

    def test_risk_cdf_below_location(self):
        pf = Portfolio(BURR, [1, 2], [1.0, 3.0], [1, 1], [0.3, 0.6])
        np.testing.assert_allclose(pf.risk_cdfs(0.5), [0.7, 0.4], rtol=1e-15)

    def test_homogeneous(self):
        pf = Portfolio.homogeneous(BURR, 4, alpha=0.5, p=0.3)
        assert pf.n == 4
        np.testing.assert_array_equal(pf.p, 0.3)


class TestMaxCdf:
    def test_single_exponential_risk(self):
        pf = Portfolio(GLFR(1, 0, 1), [1.0], [1e-300], [1.0], [1.0])
        assert max_cdf(pf, math.log(2)) == pytest.approx(0.5, rel=1e-14)

    def test_no_claims_limit(self):
        pf = Portfolio(BURR, [1, 1], [1, 1], [1, 1], [1e-300, 1e-300])
        assert max_cdf(pf, 1.3) == pytest.approx(1.0, abs=1e-15)

    def test_factorization(self):
        pf = hetero6()
        t = np.linspace(0, 5, 50)
        np.testing.assert_allclose(max_cdf(pf, t), np.prod(pf.risk_cdfs(t), axis=1), rtol=1e-15)

    def test_atom_at_zero(self):
        pf = hetero6()
        assert max_cdf(pf, 0.0) == pytest.approx(np.prod(1 - pf.p), rel=1e-14)
        assert max_cdf(pf, -1.0) == 0.0

    def test_monotone_bounded(self):
        t = np.linspace(0, 30, 5000)
        f = max_cdf(hetero6(), t)
        assert np.all(np.diff(f) >= 0)
        assert np.all((f >= 0) & (f <= 1))

    def test_matches_extended_precision(self):
        pf = hetero6()
        for t in (0.7, 1.4, 3.0):
            ref = oracle.max_cdf("BurrPower", BURR.params, pf.alpha, pf.lam, pf.theta, pf.p, t)
            assert max_cdf(pf, t) == pytest.approx(float(ref), rel=1e-13)

    def test_log_cdf_consistent(self):
        pf = hetero6()
        t = np.linspace(1.0, 6.0, 40)
        # log of the product loses relative accuracy as F approaches 1
        np.testing.assert_allclose(log_max_cdf(pf, t), np.log(max_cdf(pf, t)), rtol=1e-12, atol=1e-15)


class TestMaxRhr:
    def test_single_risk_collapse(self):
        pf = Portfolio(LOMAX, [1.0], [0.4], [2.0], [1.0])
        t = np.linspace(0.5, 5, 20)
        x = (t - 0.4) / 2.0
        np.testing.assert_allclose(max_rhr(pf, t), LOMAX.pdf(x) / (2.0 * LOMAX.cdf(x)), rtol=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            max_rhr(hetero6(), 0.9)

    @pytest.mark.parametrize("which", ["u", "v"])
    def test_fixture_frozen_values(self, which):
        pf = dict(zip("uv", ex34_pair()))[which]
        k = "uv".index(which)
        for t, ref in EX34_RHR.items():
            assert max_rhr(pf, t) == pytest.approx(ref[k], rel=1e-12)

    def test_frozen_values_reproduce(self):
        u, _ = ex34_pair()
        ref = oracle.max_rhr("GLFR", GLFR_REF.params, u.alpha, u.lam, u.theta, u.p, 10.0)
        assert float(ref) == pytest.approx(EX34_RHR[10.0][0], rel=1e-15)

    @pytest.mark.parametrize("pf", [hetero6(), ex34_pair()[0],
                                    Portfolio(LOMAX, [1, 1], [0.9, 0.6], [0.5, 0.5],
                                              np.sqrt([0.2, 0.3]))])
    def test_log_derivative(self, pf):
        t = np.linspace(pf.lam.max() + 0.05, max_quantile(pf, 0.999), 100)
        h = 1e-6 * t
        fd = (log_max_cdf(pf, t + h) - log_max_cdf(pf, t - h)) / (2 * h)
        np.testing.assert_allclose(max_rhr(pf, t), fd, rtol=1e-5)


class TestKthCdf:
    def test_top_equals_max(self):
        pf = hetero6()
        t = np.linspace(0, 5, 30)
        np.testing.assert_allclose(kth_cdf(pf, 6, t), max_cdf(pf, t), rtol=1e-14)

    def test_minimum_of_two(self):
        pf = Portfolio(BURR, [1, 0.5], [0.2, 0.4], [1, 2], [0.6, 0.8])
        t = np.linspace(0, 4, 30)
        h = pf.risk_cdfs(t)
        ref = h[:, 0] + h[:, 1] - h[:, 0] * h[:, 1]
        np.testing.assert_allclose(kth_cdf(pf, 1, t), ref, rtol=1e-14)

    def test_monotone_in_k_and_t(self):
        pf = hetero6()
        t = np.linspace(0, 6, 300)
        curves = np.array([kth_cdf(pf, k, t) for k in range(1, 7)])
        assert np.all(np.diff(curves, axis=0) <= 1e-15)
        assert np.all(np.diff(curves, axis=1) >= -1e-15)

    def test_size_limit(self):
        pf = Portfolio.homogeneous(BURR, 21)
        with pytest.raises(PortfolioSizeError):
            kth_cdf(pf, 3, 1.0)

    def test_index_range(self):
        with pytest.raises(ValueError):
            kth_cdf(hetero6(), 7, 1.0)

    def test_monte_carlo(self):
        pf = hetero6()
        rng = np.random.default_rng(11)
        n = 200_000
        occurs = rng.random((n, 6)) < pf.p
        level = rng.random((n, 6)) ** (1 / pf.alpha)
        claims = np.where(occurs, pf.lam + pf.theta * BURR.ppf(level), 0.0)
        third = np.sort(claims, axis=1)[:, 2]
        t = 1.0
        est = np.mean(third <= t)
        se = math.sqrt(est * (1 - est) / n)
        assert abs(est - kth_cdf(pf, 3, t)) <= 3 * se


class TestSampling:
    def test_deterministic(self):
        pf = hetero6()
        np.testing.assert_array_equal(sample_max(pf, 5, 1000), sample_max(pf, 5, 1000))

    def test_no_claims_limit(self):
        pf = Portfolio(BURR, [1, 1], [1, 1], [1, 1], [1e-300, 1e-300])
        assert np.all(sample_max(pf, 1, 1000) == 0.0)

    def test_count_validated(self):
        with pytest.raises(ValueError):
            sample_max(hetero6(), 0, 0)

    def test_empirical_cdf_at_median(self):
        pf = ex34_pair()[0]
        med = max_quantile(pf, 0.5)
        x = sample_max(pf, 3, 200_000)
        assert abs(np.mean(x <= med) - max_cdf(pf, med)) <= 0.005

    def test_ks_distance_small(self):
        pf = hetero6()
        assert ks_distance(pf, sample_max(pf, 2, 100_000)) <= 0.01

    def test_ks_distance_detects_wrong_law(self):
        pf = hetero6()
        other = pf.replace(theta=pf.theta * 1.5)
        assert ks_distance(pf, sample_max(other, 2, 100_000)) > 0.05


class TestReliabilityBound:
    def test_vanishes_in_tail(self):
        assert reliability_lower_bound(0.3, 0.6, 1.0, 1.0, 2.0, 0.8, GLFR_REF, 60.0) == \
            pytest.approx(0.0, abs=1e-6)

    def test_homogeneous_is_exact(self):
        t = np.linspace(1.0, 20.0, 200)
        bound = reliability_lower_bound(0.4, 0.4, 1.0, 2.0, 2.0, 0.7, LOMAX, t)
        pf = Portfolio(LOMAX, [0.7, 0.7], [1.0, 1.0], [2.0, 2.0], [0.4, 0.4])
        np.testing.assert_allclose(bound, 1 - max_cdf(pf, t), rtol=1e-12)

    def test_below_location_rejected(self):
        with pytest.raises(ValueError):
            reliability_lower_bound(0.3, 0.6, 1.0, 1.0, 2.0, 0.8, LOMAX, 0.5)

    @settings(max_examples=40, deadline=None)
    @given(p1=st.floats(0.05, 0.95), p2=st.floats(0.05, 0.95), th1=st.floats(0.2, 10),
           th2=st.floats(0.2, 10), alpha=st.floats(0.05, 1), lam=st.floats(0.1, 5))
    def test_bound_below_survival(self, p1, p2, th1, th2, alpha, lam):
        pf = Portfolio(LOMAX, [alpha, alpha], [lam, lam], [th1, th2], [p1, p2])
        t = np.geomspace(lam + 1e-6, lam + 1e4, 400)
        bound = reliability_lower_bound(p1, p2, lam, th1, th2, alpha, LOMAX, t)
        assert np.all(bound <= 1 - max_cdf(pf, t) + 1e-12)


class TestGrids:
    def test_default_grid(self):
        u, v = ex34_pair()
        g = default_grid(u, v)
        assert g.t_min == pytest.approx(5.0 + 1e-6)
        assert g.points == 2000
        assert max(max_cdf(u, g.t_max), max_cdf(v, g.t_max)) >= 0.9999 - 1e-9

    def test_saturating_grid_reaches_tail(self):
        u, v = ex34_pair()
        g = saturating_grid(u, v)
        assert min(max_cdf(u, g.t_max), max_cdf(v, g.t_max)) >= 1 - 1e-12
