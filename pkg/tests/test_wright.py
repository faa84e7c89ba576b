import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from fracnbp.errors import AccuracyLoss, DivergentSeries, MaxTermsExceeded
from fracnbp.wright import (
    SeriesConfig,
    WrightSpec21,
    gen_binomial,
    log_gamma,
    recip_gamma,
    wright_2psi1,
)
from oracles import wright_bruteforce


class TestSeriesConfig:
    def test_defaults(self):
        cfg = SeriesConfig()
        assert (cfg.abs_tol, cfg.max_terms, cfg.cancellation_guard) == (1e-14, 2000, 1e8)

    @pytest.mark.parametrize(
        "kw", [{"abs_tol": 0}, {"max_terms": 0}, {"max_terms": 2.5}, {"cancellation_guard": 0.5}]
    )
    def test_rejects_invalid(self, kw):
        with pytest.raises(ValueError):
            SeriesConfig(**kw)


class TestSpec:
    def test_delta_and_scale(self):
        spec = WrightSpec21(1, 0.5, 2, 1, 1, 0.5, -0.5)
        assert spec.delta_index() == -1
        assert spec.scale_const() == pytest.approx(0.5**-0.5 * 0.5**0.5)

    def test_zero_slope_contributes_one(self):
        assert WrightSpec21(1, 0, 1, 1, 1, 1, 1).scale_const() == 1.0


class TestGammaHelpers:
    @pytest.mark.parametrize("x,expected", [(1, 0.0), (5, math.log(24)), (0.5, 0.5 * math.log(math.pi))])
    def test_log_gamma_values(self, x, expected):
        assert log_gamma(x) == pytest.approx(expected, abs=1e-12)

    def test_log_gamma_relative_accuracy(self):
        for x in np.geomspace(1e-3, 1e6, 60):
            ref = float(special.gammaln(x))
            assert abs(log_gamma(x) - ref) <= 1e-13 * max(1.0, abs(ref))

    @pytest.mark.parametrize("x", [0, -1, -2.0, -0.0])
    def test_log_gamma_domain(self, x):
        with pytest.raises(ValueError):
            log_gamma(x)

    @pytest.mark.parametrize(
        "x,expected", [(0, 0.0), (1, 1.0), (-0.5, -1 / (2 * math.sqrt(math.pi))), (-3, 0.0)]
    )
    def test_recip_gamma_values(self, x, expected):
        assert recip_gamma(x) == pytest.approx(expected, abs=1e-12)

    def test_recip_gamma_exact_zero_at_poles(self):
        assert all(recip_gamma(-k) == 0.0 for k in range(10))

    def test_reciprocal_identity(self):
        for x in np.linspace(0.01, 100, 500):
            assert recip_gamma(x) * math.exp(log_gamma(x)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("a,n,expected", [(0.37, 0, 1.0), (0.5, 2, -0.125), (3, 5, 0.0), (3, 2, 3.0)])
    def test_gen_binomial_values(self, a, n, expected):
        assert gen_binomial(a, n) == pytest.approx(expected, abs=1e-15)

    def test_gen_binomial_matches_gamma_ratio(self):
        for a in (-0.7, 0.3, 0.9, 2.5, 7):
            for n in range(21):
                ref = math.gamma(a + 1) / math.factorial(n) * recip_gamma(a - n + 1)
                assert gen_binomial(a, n) == pytest.approx(ref, rel=1e-12, abs=1e-300)

    def test_gen_binomial_negative_integer_a(self):
        # a - n + 1 = -2 is a negative integer; n = 0 is the empty product
        assert gen_binomial(-1, 0) == 1.0
        assert gen_binomial(-1, 3) == 0.0

    def test_gen_binomial_rejects_negative_n(self):
        with pytest.raises(ValueError):
            gen_binomial(0.5, -1)

    @pytest.mark.parametrize("x", [0.5, 1.3])
    def test_alternating_partial_sums(self, x):
        # sum_{n<=K} (-1)^n binom(x, n) = (-1)^K binom(x - 1, K), which tends to 0
        partial = np.cumsum([(-1) ** n * gen_binomial(x, n) for n in range(401)])
        for K in (10, 100, 400):
            assert partial[K] == pytest.approx((-1) ** K * gen_binomial(x - 1, K), rel=1e-9, abs=1e-15)
        assert abs(partial[400]) < abs(partial[100]) < abs(partial[10])


class TestWright:
    def test_exponential(self):
        assert float(wright_2psi1(WrightSpec21(1, 0, 1, 1, 1, 1, 1))) == pytest.approx(math.e, abs=1e-13)

    def test_sfnb_zero_closed_form(self):
        res = wright_2psi1(WrightSpec21(1, 0.5, 2, 1, 1, 0.5, -0.5))
        assert res.value == pytest.approx(4 / 9, abs=1e-13)
        assert res.terms_used > 0 and res.max_term >= abs(res.value)

    def test_diverges_on_boundary(self):
        with pytest.raises(DivergentSeries):
            wright_2psi1(WrightSpec21(1, 0.5, 2, 1, 1, 0.5, -1.5))

    def test_diverges_below_minus_one(self):
        with pytest.raises(DivergentSeries):
            wright_2psi1(WrightSpec21(1, 1, 1, 1, 1, 0.5, 0.1))

    def test_divergent_series_is_value_error(self):
        assert issubclass(DivergentSeries, ValueError)

    def test_z_zero(self):
        assert wright_2psi1(WrightSpec21(1, 0.5, 2, 1, 1, 0.5, 0.0)).value == pytest.approx(1.0)

    def test_max_terms(self):
        with pytest.raises(MaxTermsExceeded):
            wright_2psi1(WrightSpec21(1, 0.5, 2, 1, 1, 0.5, -0.99), SeriesConfig(max_terms=20))

    def test_cancellation_guard(self):
        # e^-30 from an alternating series with terms near 1e12
        with pytest.raises(AccuracyLoss):
            wright_2psi1(WrightSpec21(1, 0, 1, 1, 1, 1, -30.0))

    GRID = [
        (1, 0.5, 2, 1, 1, 0.5, -0.5),
        (1, 0.5, 2, 1, -2, 0.5, -0.5),
        (1, 0.3, 1, 1, 1, 0.3, -0.8),
        (1, 0.3, 1, 1, -4, 0.3, -0.8),
        (1, 0.7, 3.5, 1, 0, 0.7, 0.6),
        (1, 0.7, 3.5, 1, -6, 0.7, -0.6),
        (1, 0.9, 0.5, 1, 1, 0.9, -0.9),
        (1, 0.9, 0.5, 1, -1, 0.9, 0.9),
        (1, 1, 2, 1, -3, 1, -0.25),
        (1, 1, 1, 1, 1, 1, 0.5),
        (1, 0.5, 1, 0, 1, 0.5, -2.0),
        (1, 0.5, 1, 0, -3, 0.5, -2.0),
        (1, 0.25, 1, 0, -1, 0.25, -3.0),
        (1, 1, 1, 0, 1, 1, -5.0),
        (2, 0.5, 1.5, 0.5, 1, 2, 1.2),
        (0.5, 0.5, 0.5, 0.5, 2, 1.5, -2.0),
        (1, 0.5, 1, 0.5, 1, 2, 10.0),
        (1, 0.6, 2, 1, -2.5, 0.6, -0.7),
        (1.5, 0.2, 0.3, 1, 0.7, 0.2, 0.4),
        (1, 0.45, 5, 1, -8, 0.45, -0.3),
    ]

    @pytest.mark.parametrize("spec", GRID)
    def test_matches_extended_precision(self, spec):
        ref = wright_bruteforce(*spec)
        got = wright_2psi1(WrightSpec21(*spec), SeriesConfig(cancellation_guard=1e12)).value
        assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))

    def test_start_skips_leading_terms(self):
        spec = (1, 0.5, 1, 1, -2, 0.5, -0.4)
        ref = wright_bruteforce(*spec, start=1)
        assert wright_2psi1(WrightSpec21(*spec), start=1).value == pytest.approx(ref, abs=1e-13)

    def test_log_scale(self):
        spec = WrightSpec21(1, 0.5, 2, 1, 1, 0.5, -0.5)
        scaled = wright_2psi1(spec, log_scale=math.log(3.0)).value
        assert scaled == pytest.approx(3 * 4 / 9, abs=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(
        beta=st.floats(0.1, 1.0),
        pt=st.floats(0.2, 5.0),
        x=st.floats(0.01, 0.9),
    )
    def test_error_bound_covers_error(self, beta, pt, x):
        # n = 0 has the closed form Gamma(pt) (1 + x)^-pt
        res = wright_2psi1(WrightSpec21(1, beta, pt, 1, 1, beta, -x))
        exact = math.gamma(pt) * (1 + x) ** -pt
        assert abs(res.value - exact) <= res.error_bound + 4 * np.finfo(float).eps * exact
