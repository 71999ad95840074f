import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phiid.counts import (
    CountModel,
    HarrisModel,
    count_from_dict,
    count_pmf,
    count_sample,
    harris_as_count_model,
    harris_pgf,
    harris_scaling_check,
    pgf_eval,
    scaled_count_limit_check,
)
from phiid.laplace import Degenerate, Exponential, Gamma, Mixture

PHIS = [
    Degenerate(1.0),
    Exponential(1.0),
    Gamma(2.0, 1.0),
    Gamma(0.5, 2.0),
    Mixture((0.4, 0.6), (Degenerate(2.0), Exponential(0.5))),
]


def mixed_poisson_pgf_mp(phi_mp, theta, j, m, s):
    """High-precision PGF of j + m*Poisson(U/theta), U with LT phi_mp."""
    s = mp.mpf(s)
    return s ** j * phi_mp((1 - s ** m) / theta)


class TestPgf:
    def test_geometric_at_zero(self):
        assert pgf_eval(CountModel(Exponential(1.0), 1.0), 0.0) == pytest.approx(0.5, rel=1e-15)

    def test_poisson_at_half(self):
        got = pgf_eval(CountModel(Degenerate(1.0), 0.5), 0.5)
        assert got == pytest.approx(float(mp.exp(-2 * (1 - mp.mpf("0.5")))), rel=1e-14)

    @pytest.mark.parametrize("phi", PHIS, ids=repr)
    @pytest.mark.parametrize("j,m", [(0, 1), (1, 1), (2, 3)])
    def test_one_at_one(self, phi, j, m):
        assert pgf_eval(CountModel(phi, 0.3, j, m), 1.0) == 1.0

    @pytest.mark.parametrize("phi", PHIS, ids=repr)
    def test_atom_at_origin_iff_j_zero(self, phi):
        assert pgf_eval(CountModel(phi, 0.7, 1, 2), 0.0) == 0.0
        assert pgf_eval(CountModel(phi, 0.7, 0, 2), 0.0) == pytest.approx(
            float(phi.evaluate(1 / 0.7)), rel=1e-14)
        assert pgf_eval(CountModel(phi, 0.7, 0, 2), 0.0) > 0

    def test_against_high_precision_mixed_poisson(self):
        model = CountModel(Gamma(2.0, 1.0), 0.4, 2, 3)
        for s in [0.1, 0.5, 0.9, 0.999]:
            ref = mixed_poisson_pgf_mp(lambda x: (1 + x) ** -2, mp.mpf("0.4"), 2, 3, s)
            assert pgf_eval(model, s) == pytest.approx(float(ref), rel=1e-13)

    @pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            pgf_eval(CountModel(Exponential(1.0), 1.0), bad)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(PHIS), st.floats(0.01, 10), st.integers(0, 3), st.integers(1, 4))
    def test_nondecreasing_convex(self, phi, theta, j, m):
        s = np.linspace(0, 1, 201)
        p = pgf_eval(CountModel(phi, theta, j, m), s)
        assert np.all(np.diff(p) >= -1e-15)
        assert np.all(np.diff(p, 2) >= -1e-12)
        assert p[-1] == 1.0


class TestPmf:
    def test_matches_pgf_series(self):
        for phi in PHIS:
            model = CountModel(phi, 0.8, 1, 2)
            pmf = count_pmf(model, 400)
            assert pmf.sum() == pytest.approx(1.0, abs=1e-12)
            for s in [0.2, 0.5, 0.8]:
                series = np.sum(pmf * s ** np.arange(pmf.size))
                assert series == pytest.approx(pgf_eval(model, s), rel=1e-12)

    def test_geometric_closed_form(self):
        pmf = count_pmf(CountModel(Exponential(1.0), 0.5), 50)
        np.testing.assert_allclose(pmf, (1 / 3) * (2 / 3) ** np.arange(51), rtol=1e-13)


class TestSampler:
    def test_poisson_mean(self, rng):
        x = count_sample(CountModel(Degenerate(1.0), 1.0), rng, 100_000)
        assert abs(x.mean() - 1.0) < 5 * math.sqrt(1.0 / x.size)

    def test_support_lattice(self, rng):
        for phi in PHIS:
            x = count_sample(CountModel(phi, 0.2, 2, 3), rng, 5000)
            assert np.all(x >= 2) and np.all((x - 2) % 3 == 0)

    def test_geometric_total_variation(self, rng):
        n = 100_000
        x = count_sample(CountModel(Exponential(1.0), 0.5), rng, n)
        emp = np.bincount(np.minimum(x, 51), minlength=52)[:51] / n
        exact = (1 / 3) * (2 / 3) ** np.arange(51)
        assert 0.5 * np.abs(emp - exact).sum() < 0.01

    @pytest.mark.parametrize("phi", PHIS, ids=repr)
    def test_empirical_pgf(self, phi):
        rng = np.random.default_rng(11)
        model = CountModel(phi, 0.6, 1, 2)
        n = 100_000
        x = count_sample(model, rng, n)
        for s in [0.2, 0.5, 0.8]:
            assert abs(np.mean(s ** x) - pgf_eval(model, s)) < 5 / math.sqrt(n)

    def test_scalar(self, rng):
        assert isinstance(count_sample(CountModel(Exponential(1.0), 1.0), rng), int)

    def test_overflow_guard(self, rng):
        with pytest.raises(OverflowError):
            count_sample(CountModel(Degenerate(1.0), 1e-12), rng, 10)
        with pytest.raises(OverflowError):
            count_sample(CountModel(Degenerate(1.0), 0.01), rng, 10, rate_cap=50)

    @pytest.mark.parametrize("phi", [Exponential(1.0), Gamma(2.0, 1.0), Degenerate(1.0)], ids=repr)
    def test_scaled_mean(self, phi):
        rng = np.random.default_rng(3)
        theta, m, n = 1e-3, 2, 100_000
        x = theta * count_sample(CountModel(phi, theta, 1, m), rng, n)
        assert abs(x.mean() - (theta + m * phi.mean)) < 5 * x.std(ddof=1) / math.sqrt(n) + 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            CountModel(Exponential(1.0), 0.0)
        with pytest.raises(ValueError):
            CountModel(Exponential(1.0), 1.0, j=-1)
        with pytest.raises(ValueError):
            CountModel(Exponential(1.0), 1.0, m=0)


class TestHarris:
    def test_endpoints(self):
        for a, m in [(1.5, 1), (3.0, 2), (10.0, 4)]:
            h = HarrisModel(a, m)
            assert harris_pgf(h, 1.0) == 1.0
            assert harris_pgf(h, 0.0) == 0.0

    def test_value(self):
        ref = mp.mpf("0.5") / mp.sqrt(2 - mp.mpf("0.25"))
        assert harris_pgf(HarrisModel(2.0, 2), 0.5) == pytest.approx(float(ref), rel=1e-15)
        assert float(ref) == pytest.approx(0.377964, abs=1e-6)

    def test_a_must_exceed_one(self):
        with pytest.raises(ValueError):
            HarrisModel(1.0, 2)

    def test_identification_a2_m1(self):
        cm = harris_as_count_model(HarrisModel(2.0, 1))
        assert cm == CountModel(Gamma(1.0, 1.0), 1.0, 1, 1)

    @pytest.mark.parametrize("a,m", [(2.0, 1), (3.0, 2), (7.5, 3), (1e4, 2)])
    def test_grid_agreement(self, a, m):
        h = HarrisModel(a, m)
        s = np.linspace(0, 1, 101)
        cm = harris_as_count_model(h)
        assert np.max(np.abs(harris_pgf(h, s) - pgf_eval(cm, s))) < 1e-12
        if (a, m) == (3.0, 2):
            assert cm.theta == 1.0

    def test_sampler_matches_pgf(self, rng):
        h = HarrisModel(4.0, 2)
        x = h.sample(rng, 100_000)
        assert np.all(x % 2 == 1)
        for s in [0.3, 0.7]:
            assert abs(np.mean(s ** x) - harris_pgf(h, s)) < 5 / math.sqrt(x.size)


class TestScalingLimits:
    def test_degenerate_prelimit_value(self):
        theta = 1e-4
        ref = mp.exp(-(1 - mp.exp(-mp.mpf(theta))) / theta)
        exact, _ = scaled_count_limit_check(Degenerate(1.0), 0, 1, [theta], [1.0], 1000,
                                            np.random.default_rng(0))
        assert abs(float(ref) - math.exp(-1)) < 1e-3
        assert exact.final_distance == pytest.approx(abs(float(ref) - math.exp(-1)), rel=1e-6)

    def test_exponential_converges(self, rng):
        exact, emp = scaled_count_limit_check(
            Exponential(1.0), 0, 1, [0.1, 0.01, 0.001], [0.5, 1.0, 2.0], 50_000, rng)
        assert exact.passed and exact.monotone
        assert emp.final_distance < 0.02

    def test_general_j_m(self, rng):
        exact, emp = scaled_count_limit_check(
            Gamma(2.0, 1.0), 3, 2, [0.1, 0.01, 0.001, 1e-4], [0.5, 1.0], 50_000, rng)
        assert exact.passed
        assert emp.final_distance < 0.02

    def test_schedule_must_decrease(self, rng):
        with pytest.raises(ValueError):
            scaled_count_limit_check(Exponential(1.0), 0, 1, [0.01, 0.1], [1.0], 10, rng)

    def test_harris_gamma_limit(self, rng):
        exact, emp = harris_scaling_check(HarrisModel(1e4, 2), [0.5, 1.0, 2.0], 100_000, rng)
        assert exact.final_distance < 1e-3
        assert emp.final_distance < 0.01

    def test_harris_limit_symbolic(self):
        # P_a(exp(-v/a)) -> (1 + m v)^(-1/m) as a -> infinity
        v, m = mp.mpf(1), 2
        for a in [mp.mpf(10) ** 6, mp.mpf(10) ** 9]:
            s = mp.exp(-v / a)
            pa = s / (a - (a - 1) * s ** m) ** (mp.mpf(1) / m)
            assert abs(pa - (1 + m * v) ** (-mp.mpf(1) / m)) < 10 / a


class TestSerialization:
    def test_roundtrip(self):
        model = CountModel(Gamma(2.0, 1.0), 0.01, 1, 2)
        assert count_from_dict(model.to_dict()) == model
        assert count_from_dict({"harris": {"a": 3.0, "m": 2}}) == HarrisModel(3.0, 2)

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="thetaa"):
            count_from_dict({"phi": {"kind": "exponential", "beta": 1.0}, "thetaa": 1})
