import json
import math

import numpy as np
import pytest

from fracnbp.distributions import nb_pmf
from fracnbp.errors import EmptySample, InsufficientSupport
from fracnbp.params import PmfTable
from fracnbp.simulation import RngStream
from fracnbp.validation import (
    GofReport,
    chi_square_stat,
    empirical_pmf,
    gof_report,
    mc_laplace_check,
    tv_distance,
)
from oracles import nb_closed, poisson_pmf


def table(d, trunc=0.0):
    keys = sorted(d)
    return PmfTable(np.array(keys), np.array([d[k] for k in keys], dtype=float), trunc)


def poisson_table(mu, kmax=60):
    probs = np.array([poisson_pmf(k, mu) for k in range(kmax + 1)])
    return PmfTable(np.arange(kmax + 1), probs, max(0.0, 1 - probs.sum()))


def nb_table(r, q, kmax=200):
    # NB with success mass (1 - q) and mean r q / (1 - q)
    probs = np.array([nb_closed(k, r, q) for k in range(kmax + 1)])
    return PmfTable(np.arange(kmax + 1), probs, max(0.0, 1 - probs.sum()))


class TestEmpirical:
    def test_example(self):
        emp = empirical_pmf([0, 0, 1])
        assert emp.as_dict() == pytest.approx({0: 2 / 3, 1: 1 / 3})
        assert emp.truncation_mass == 0.0

    def test_point_mass(self):
        assert empirical_pmf([4] * 7).as_dict() == {4: 1.0}

    def test_sums_to_one(self):
        emp = empirical_pmf(np.random.default_rng(0).poisson(3.0, 1000))
        assert math.fsum(emp.probs) == pytest.approx(1.0, abs=1e-14)
        assert np.all(np.diff(emp.support) > 0)

    def test_vectors(self):
        emp = empirical_pmf([[0, 1], [0, 1], [2, 0]])
        assert emp.as_dict() == pytest.approx({(0, 1): 2 / 3, (2, 0): 1 / 3})

    def test_poisson_sample(self):
        x = np.random.default_rng(1).poisson(1.0, 100_000)
        assert tv_distance(empirical_pmf(x), poisson_table(1.0)) < 0.01

    def test_errors(self):
        with pytest.raises(EmptySample):
            empirical_pmf([])
        with pytest.raises(ValueError):
            empirical_pmf([1, -1])
        with pytest.raises(ValueError):
            empirical_pmf([0.5])


class TestTv:
    def test_examples(self):
        p = table({0: 0.5, 1: 0.5})
        assert tv_distance(p, p) == 0.0
        assert tv_distance(table({0: 1.0}), table({1: 1.0})) == 1.0
        assert tv_distance(p, table({0: 1.0})) == pytest.approx(0.5)

    def test_truncation_counts_as_discrepancy(self):
        # identical listed mass, but the second table admits 1% is missing
        p = table({0: 0.5, 1: 0.5})
        q = table({0: 0.5, 1: 0.5}, trunc=0.01)
        assert tv_distance(p, q) == pytest.approx(0.005)

    def test_metric(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            tabs = []
            for _ in range(3):
                w = rng.random(6) * (rng.random(6) < 0.7)
                w[rng.integers(6)] += 0.1
                tabs.append(PmfTable(np.arange(6), w / w.sum(), 0.0))
            a, b, c = tabs
            assert tv_distance(a, b) == pytest.approx(tv_distance(b, a))
            assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-15
            assert 0.0 <= tv_distance(a, b) <= 1.0


class TestChiSquare:
    def test_calibration_poisson(self):
        expected = poisson_table(2.0)
        passes = sum(
            chi_square_stat(np.random.default_rng(seed).poisson(2.0, 100_000), expected).pass_ for seed in range(100)
        )
        assert passes >= 95

    def test_calibration_nb(self):
        # r = 2, q = 1/4 as a gamma-Poisson mixture
        expected = nb_table(2.0, 0.25)
        passes = 0
        for seed in range(100):
            g = np.random.default_rng(1000 + seed)
            passes += chi_square_stat(g.poisson(g.standard_gamma(2.0, 100_000) / 3.0), expected).pass_
        assert passes >= 95

    def test_power(self):
        g = np.random.default_rng(5)
        x = g.poisson(g.standard_gamma(2.0, 100_000) / 3.0)
        wrong = nb_table(2.0, 0.5)
        # closed-form TV between the two laws is 11/32
        assert tv_distance(nb_table(2.0, 0.25), wrong) == pytest.approx(11 / 32, abs=1e-9)
        rep = chi_square_stat(x, wrong)
        assert not rep.pass_ and rep.statistic > rep.threshold

    def test_quantile_and_dof(self):
        rep = chi_square_stat(np.random.default_rng(2).poisson(2.0, 10_000), poisson_table(2.0))
        from scipy import stats

        assert rep.dof >= 1 and rep.threshold == pytest.approx(stats.chi2.ppf(0.99, rep.dof))
        assert rep.criterion == "chi2"

    def test_insufficient_support(self):
        with pytest.raises(InsufficientSupport):
            chi_square_stat(np.arange(10), PmfTable(np.arange(100), np.full(100, 0.01), 0.0), min_cell=5)

    def test_out_of_table_samples_fall_in_tail(self):
        # values beyond the listed support land in the tail cell rather than vanishing
        expected = PmfTable(np.arange(3), np.array([0.5, 0.3, 0.2]), 0.0)
        inside = chi_square_stat([0] * 50 + [1] * 30 + [2] * 20, expected)
        outside = chi_square_stat([0] * 50 + [1] * 30 + [7] * 20, expected)
        assert inside.statistic == 0.0 and outside.statistic == 0.0
        assert chi_square_stat([7] * 100, expected).statistic > 100

    def test_nb_helper_matches_package(self):
        for k in range(10):
            assert nb_closed(k, 2.0, 0.25) == pytest.approx(nb_pmf(k, 2.0, 0.25), rel=1e-12)


class TestGofReport:
    def test_json(self):
        rep = gof_report(np.random.default_rng(0).poisson(1.0, 20_000), poisson_table(1.0), params={"mu": 1.0}, seed=4)
        d = json.loads(rep.to_json())
        assert {"statistic", "dof", "tv_distance", "n_samples", "pass", "threshold", "params", "seed"} <= set(d)
        assert d["pass"] is True and d["seed"] == 4 and d["params"] == {"mu": 1.0}
        assert d["criterion"] == "tv" and d["n_samples"] == 20_000

    def test_low_power_warning(self):
        rep = gof_report(np.random.default_rng(0).poisson(3.0, 100), poisson_table(3.0))
        assert any("low power" in w for w in rep.warnings)

    def test_fail(self):
        rep = gof_report(np.random.default_rng(0).poisson(3.0, 20_000), poisson_table(2.0))
        assert not rep.pass_ and rep.tv_distance > rep.threshold

    def test_invariants(self):
        with pytest.raises(ValueError):
            GofReport(1.0, 0, 0.1, 10, True, 1.0)
        with pytest.raises(ValueError):
            GofReport(1.0, 2, 1.5, 10, True, 1.0)


class TestLaplace:
    @pytest.mark.parametrize("beta,s", [(0.5, 1.0), (0.8, 2.0)])
    def test_examples(self, beta, s):
        assert mc_laplace_check(beta, [s], 100_000, RngStream(1)) < 0.01

    def test_small_s(self):
        assert mc_laplace_check(0.5, [1e-12], 1000, RngStream(1)) < 1e-5

    def test_rejects_nonpositive_s(self):
        with pytest.raises(ValueError):
            mc_laplace_check(0.5, [0.0, 1.0], 10, RngStream(1))
