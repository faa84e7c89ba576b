import math

import numpy as np
import pytest

from fracnbp.distributions import sfnb_pmf
from fracnbp.errors import AccuracyLoss
from fracnbp.params import DistOrderParams, MultiParams, SfnbParams
from fracnbp.residuals import fractional_difference, governing_residual
from fracnbp.wright import gen_binomial


def test_fractional_difference_integer_order():
    vals = np.array([1.0, 4.0, 9.0, 16.0])
    assert np.allclose(fractional_difference(vals, 1.0), [1.0, 3.0, 5.0, 7.0])
    assert np.allclose(fractional_difference(vals, 0.0), vals)


def test_fractional_difference_composes():
    # (I - B)^0.5 applied twice is (I - B)
    vals = np.random.default_rng(0).random(12)
    twice = fractional_difference(fractional_difference(vals, 0.5), 0.5)
    assert np.allclose(twice, fractional_difference(vals, 1.0), atol=1e-13)


def test_n_zero_identity():
    params = SfnbParams(0.5, 4, 1, 4)
    x, pt = params.series_ratio(), 2.0
    lhs = (1 + x) ** -(pt - 1) - (1 + x) ** -pt
    assert lhs == pytest.approx(x * (1 + x) ** -pt)
    assert abs(governing_residual("sfnb", 0, pt, params)) < 1e-15


@pytest.mark.parametrize(
    "params,t",
    [(SfnbParams(0.6, 2, 1, 1), 2.5), (SfnbParams(0.9, 3, 2, 2), 1.0), (SfnbParams(1.0, 2, 1.5, 1), 3.0)],
)
def test_sfnb(params, t):
    for n in range(11):
        assert abs(governing_residual("sfnb", n, t, params)) < 1e-9


def test_sfnb_example():
    assert abs(governing_residual("sfnb", 3, 2.5, SfnbParams(0.6, 2, 1, 1))) < 1e-9


@pytest.mark.parametrize(
    "params,t",
    [
        (DistOrderParams(0.3, 0.7, 0.5, 0.5, 2, 1, 1), 2.0),
        (DistOrderParams(0.5, 0.9, 0.2, 0.8, 3, 2, 1.5), 1.0),
    ],
)
def test_distorder(params, t):
    for n in range(8):
        assert abs(governing_residual("distorder", n, t, params)) < 1e-9


def test_multivariate_example():
    params = MultiParams(0.7, 2.0, (0.5, 0.5))
    assert abs(governing_residual("multivariate", (1, 1), 2.0, params)) < 1e-9


def test_multivariate_beta_one_matches_first_order_operator():
    # at beta = 1 the backward operator is I - sum_j (lam_j / s) B_j
    params = MultiParams(1.0, 4.0, (1.0, 2.0))
    assert abs(governing_residual("multivariate", (2, 1), 2.0, params)) < 1e-12


def test_residual_detects_wrong_pmf():
    # shifting beta on the right-hand side breaks the identity
    params, other = SfnbParams(0.6, 2, 1, 1), SfnbParams(0.7, 2, 1, 1)
    vals = [sfnb_pmf(m, 2.5, params) for m in range(4)]
    lhs = sfnb_pmf(3, 1.5, params) - sfnb_pmf(3, 2.5, params)
    rhs = other.series_ratio() * fractional_difference(vals, other.beta)[3]
    assert abs(lhs - rhs) > 1e-4


def test_time_must_exceed_shift():
    with pytest.raises(ValueError):
        governing_residual("sfnb", 1, 0.5, SfnbParams(0.6, 2, 1, 1))
    with pytest.raises(ValueError):
        governing_residual("other", 1, 2.0, SfnbParams(0.6, 2, 1, 1))


def test_returns_float():
    assert type(governing_residual("sfnb", 2, 2.0, SfnbParams(0.6, 2, 1, 1))) is float


def test_methods_agree_near_gate():
    # ratio 3/4: the plain series refuses total 10, "auto" inverts the pgf there
    params = MultiParams(1.0, 4.0, (1.0, 2.0))
    with pytest.raises(AccuracyLoss):
        governing_residual("multivariate", (2, 8), 1.5, params)
    assert abs(governing_residual("multivariate", (2, 8), 1.5, params, method="auto")) < 1e-12
    for n in range(6):
        a = governing_residual("sfnb", n, 2.5, SfnbParams(0.6, 2, 1, 1), method="contour")
        assert abs(a) < 1e-12
