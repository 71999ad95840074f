import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phiid.charfn import (
    CompoundPoisson,
    DegenerateJump,
    GaussianJump,
    PhiIdLaw,
    SemiStable,
    Stable,
    SymmetricTwoPoint,
    cf_distance,
    cf_eval,
    definetti_limit_eval,
    empirical_cf,
    id_roundtrip,
    law_from_dict,
    no_real_zero_check,
    psi_from_dict,
    selfdecomp_ratio_check,
    symmetric_grid,
)
from phiid.laplace import Degenerate, Exponential, Gamma, Mixture

PHIS = [Degenerate(1.0), Exponential(1.0), Gamma(2.0, 1.0), Gamma(0.5, 2.0),
        Mixture((0.3, 0.7), (Degenerate(0.5), Gamma(3.0, 0.5)))]
PSIS = [
    Stable(1.0, 1.5, 0.0), Stable(1.0, 1.0, 0.0), Stable(1.0, 2.0, 0.0),
    Stable(1.0, 0.7, 0.5), Stable(2.0, 1.5, -0.4),
    CompoundPoisson(2.0, SymmetricTwoPoint(1.0)),
    CompoundPoisson(1.0, GaussianJump()),
    CompoundPoisson(1.5, DegenerateJump(0.7)),
    SemiStable(1.2, 0.03, 2.0),
]
LAWS = [PhiIdLaw(p, q) for p in PHIS for q in PSIS]


class TestGrid:
    def test_zero_present(self):
        g = symmetric_grid(5.0, 101)
        assert g[50] == 0.0 and g[0] == -5.0 and g[-1] == 5.0

    def test_even_rejected(self):
        with pytest.raises(ValueError):
            symmetric_grid(5.0, 100)


class TestCfEval:
    def test_linnik_value(self):
        assert cf_eval(PhiIdLaw(Exponential(1.0), Stable(1.0, 1.5)), 1.0) == pytest.approx(0.5)

    def test_generalized_linnik_value(self):
        got = cf_eval(PhiIdLaw(Gamma(2.0, 1.0), Stable(2.0, 2.0)), 1.0)
        assert got == pytest.approx(1 / 9, rel=1e-15)

    def test_skewed_against_mpmath(self):
        law = PhiIdLaw(Gamma(0.5, 2.0), Stable(1.0, 0.7, 0.5))
        for t in [-2.0, -0.3, 0.4, 3.0]:
            psi = mp.mpf(abs(t)) ** mp.mpf("0.7") * mp.exp(-1j * mp.mpf("0.5") * mp.sign(t))
            ref = (1 + 2 * psi) ** mp.mpf("-0.5")
            assert abs(cf_eval(law, t) - complex(ref)) < 1e-14

    @pytest.mark.parametrize("law", LAWS[::7], ids=repr)
    def test_one_at_origin(self, law):
        assert cf_eval(law, 0.0) == 1.0 + 0j

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(LAWS), st.floats(-30, 30))
    def test_hermitian_and_bounded(self, law, t):
        a, b = cf_eval(law, np.array([t, -t]))
        assert abs(a - np.conj(b)) < 1e-14
        assert abs(a) <= 1 + 1e-14

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(PSIS), st.floats(-20, 20))
    def test_degenerate_phi_is_id_cf(self, psi, t):
        assert abs(cf_eval(PhiIdLaw(Degenerate(1.0), psi), t) - np.exp(-psi(t))) < 1e-14

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            cf_eval(LAWS[0], math.inf)


class TestExponents:
    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 100))
    def test_semistable_scaling(self, t):
        psi = SemiStable(1.2, 0.03, 2.0)
        lhs = psi(2.0 ** (1 / 1.2) * t).real
        assert lhs == pytest.approx(2.0 * psi(t).real, rel=1e-12)

    def test_semistable_eps_cap(self):
        with pytest.raises(ValueError):
            SemiStable(1.2, 0.06, 2.0)

    @pytest.mark.parametrize("alpha,skew", [(0.7, 1.2), (1.5, 0.8), (2.0, 0.1), (1.0, 1.6)])
    def test_skew_bound(self, alpha, skew):
        with pytest.raises(ValueError):
            Stable(1.0, alpha, skew)

    def test_skew_at_bound_allowed(self):
        Stable(1.0, 0.5, math.pi / 4)

    def test_compound_poisson_closed_form(self):
        t = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(CompoundPoisson(2.0, SymmetricTwoPoint(1.0))(t),
                                   2.0 * (1 - np.cos(t)), atol=1e-15)
        np.testing.assert_allclose(CompoundPoisson(1.0, GaussianJump())(t),
                                   1 - np.exp(-t ** 2 / 2), atol=1e-15)

    @pytest.mark.parametrize("psi", PSIS, ids=repr)
    def test_dict_roundtrip(self, psi):
        assert psi_from_dict(psi.to_dict()) == psi

    def test_law_dict_unknown_key(self):
        with pytest.raises(ValueError, match="lam"):
            psi_from_dict({"kind": "stable", "lam": 1.0, "alpha": 1.5})


class TestNoRealZero:
    def test_linnik_edge(self):
        res = no_real_zero_check(PhiIdLaw(Exponential(1.0), Stable(1.0, 1.5)),
                                 symmetric_grid(50.0, 1001))
        assert res.min_modulus == pytest.approx(1 / (1 + 50 ** 1.5), rel=1e-12)
        assert abs(res.argmin) == 50.0
        assert res.passed and res.min_modulus > 1e-4

    def test_gaussian(self):
        res = no_real_zero_check(PhiIdLaw(Degenerate(1.0), Stable(1.0, 2.0)),
                                 symmetric_grid(3.0, 61))
        assert res.min_modulus == pytest.approx(math.exp(-9), rel=1e-12)

    def test_uniform_foil_has_zero(self):
        t = np.linspace(-2 * math.pi, 2 * math.pi, 401)

        def sinc(x):
            return np.sinc(x / math.pi)

        res = no_real_zero_check(sinc, t)
        assert res.min_modulus < 1e-12
        assert abs(abs(res.argmin) - math.pi) < 1e-9 or abs(abs(res.argmin) - 2 * math.pi) < 1e-9

    @pytest.mark.parametrize("law", LAWS, ids=repr)
    def test_phi_id_laws_positive(self, law):
        assert no_real_zero_check(law, symmetric_grid(10.0, 201)).passed

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            no_real_zero_check(LAWS[0], [])


class TestIdRoundtrip:
    @pytest.mark.parametrize("law", [l for l in LAWS if not isinstance(l.phi, Mixture)], ids=repr)
    def test_recovers_exponent(self, law):
        assert id_roundtrip(law, symmetric_grid(10.0, 201)) < 1e-10

    def test_mixture_rejected(self):
        with pytest.raises(NotImplementedError):
            id_roundtrip(PhiIdLaw(PHIS[-1], PSIS[0]), [0.5])


class TestDeFinetti:
    def _run(self, phi, ns=(10, 100, 1000, 10000)):
        alpha = 2.0
        psi = Stable(1.0, alpha)
        return definetti_limit_eval(
            phi, psi,
            h_n=lambda n, t: np.exp(-np.abs(t) ** alpha / n),
            a_n=lambda n: float(n),
            n_schedule=ns,
            t_grid=symmetric_grid(3.0, 101),
        )

    @pytest.mark.parametrize("phi", PHIS[:3], ids=repr)
    def test_converges(self, phi):
        rep = self._run(phi)
        assert rep.passed and rep.monotone
        assert rep.final_distance < 1e-3

    def test_rate_is_one_over_n(self):
        # n(1 - exp(-x/n)) - x ~ -x^2/(2n)  ->  distance shrinks tenfold per decade
        d = self._run(Degenerate(1.0)).distances
        ratios = np.array(d[:-1]) / np.array(d[1:])
        assert np.all(ratios > 8) and np.all(ratios < 12)

    def test_callable_target(self):
        rep = definetti_limit_eval(
            Exponential(1.0), lambda t: 1 / (1 + t ** 2),
            lambda n, t: np.exp(-t ** 2 / n), lambda n: float(n), [100, 1000],
            symmetric_grid(3.0, 31))
        assert rep.final_distance < 1e-2

    def test_schedule_increasing(self):
        with pytest.raises(ValueError):
            self._run(Exponential(1.0), ns=(100, 10))


class TestSelfDecomposability:
    @pytest.mark.parametrize("phi", [Exponential(1.0), Gamma(2.0, 1.0), Gamma(0.5, 3.0)], ids=repr)
    @pytest.mark.parametrize("c", [0.3, 0.5, 0.9])
    def test_gamma_family_passes(self, phi, c):
        assert selfdecomp_ratio_check(phi, c).passed

    def test_exponential_ratio_closed_form(self):
        # (1 + c s)/(1 + s) = c + (1-c)/(1+s): CM
        phi, c = Exponential(1.0), 0.4
        s = np.linspace(0.1, 5, 20)
        np.testing.assert_allclose(phi.evaluate(s) / phi.evaluate(c * s), c + (1 - c) / (1 + s),
                                   rtol=1e-14)

    def test_two_point_mixture_fails(self):
        # mixture of point masses at 0-ish and far away: ratio not CM
        phi = Mixture((0.5, 0.5), (Degenerate(0.01), Degenerate(5.0)))
        assert not selfdecomp_ratio_check(phi, 0.5).passed

    def test_c_domain(self):
        with pytest.raises(ValueError):
            selfdecomp_ratio_check(Exponential(1.0), 1.0)


class TestEmpirical:
    def test_constant_sample(self):
        vals, err = empirical_cf(np.full(4, 2.0), [0.0, 1.0])
        np.testing.assert_allclose(vals, [1.0, np.exp(2j)], atol=1e-15)
        assert err == 0.5

    def test_normal_ecf(self, rng):
        x = rng.standard_normal(100_000)
        t = symmetric_grid(3.0, 31)
        vals, err = empirical_cf(x, t)
        assert cf_distance(vals, np.exp(-t ** 2 / 2)) < 5 * err

    def test_chunking_consistent(self, rng):
        x = rng.standard_normal(3_000_000 // 100)
        t = symmetric_grid(5.0, 301)
        vals, _ = empirical_cf(x, t)
        direct = np.exp(1j * np.outer(t, x)).mean(axis=1)
        assert np.max(np.abs(vals - direct)) < 1e-12

    def test_empty(self):
        with pytest.raises(ValueError):
            empirical_cf([], [0.0])

    def test_distance_mismatch(self):
        with pytest.raises(ValueError):
            cf_distance(np.ones(3), np.ones(4))
        assert cf_distance([1, 1j], [1, 0]) == 1.0


def test_law_from_dict_roundtrip():
    for law in LAWS[::5]:
        assert law_from_dict(law.to_dict()) == law
