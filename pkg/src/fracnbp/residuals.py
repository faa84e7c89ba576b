"""Residuals of the difference-differential equations solved by the pmfs.

The operator ``exp(-(1/p) d/dt)`` is an exact time shift, so each equation
reduces to ``pmf(n | t - 1/p) - pmf(n | t) = RHS`` where the right-hand side
is a finite fractional backward difference in ``n``.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .distributions import distorder_pmf, sfnb_pmf
from .multivariate import multi_sfnb_pmf
from .wright import gen_binomial

__all__ = ["governing_residual", "fractional_difference"]

VARIANTS = ("sfnb", "distorder", "multivariate")


def fractional_difference(values, beta):
    """``(I - B)^beta`` applied to a sequence, returned at every index.

    ``values[m]`` is the function at ``m``; entries below index 0 are zero.
    """
    values = np.asarray(values, dtype=float)
    coef = np.array([(-1) ** j * gen_binomial(beta, j) for j in range(len(values))])
    return np.array([math.fsum((coef[: m + 1] * values[m::-1]).tolist()) for m in range(len(values))])


def _check_time(t, p):
    if not t > 1.0 / p:
        raise ValueError(f"need t > 1/p = {1.0 / p:.6g} so the shifted time stays positive")


def governing_residual(variant, n, t, params, cfg=None, method="series"):
    """LHS - RHS of the governing equation for ``variant`` at ``n`` (or ``nvec``).

    Parameters
    ----------
    variant : {"sfnb", "distorder", "multivariate"}
    n : int or sequence of int
    t : float
        Must exceed ``1/p`` (``1`` for the multivariate process).
    params : SfnbParams, DistOrderParams or MultiParams
    cfg : SeriesConfig, optional
    method : {"series", "contour", "auto"}
        How the pmf values are evaluated; see :func:`sfnb_pmf`.
    """
    if variant == "sfnb":
        _check_time(t, params.p)
        n = int(n)
        lhs = sfnb_pmf(n, t - 1.0 / params.p, params, cfg, method) - sfnb_pmf(n, t, params, cfg, method)
        vals = [sfnb_pmf(m, t, params, cfg, method) for m in range(n + 1)]
        rhs = params.series_ratio() * fractional_difference(vals, params.beta)[n]
        return float(lhs - rhs)
    if variant == "distorder":
        _check_time(t, params.p)
        n = int(n)
        lhs = distorder_pmf(n, t - 1.0 / params.p, params, cfg, method) - distorder_pmf(n, t, params, cfg, method)
        vals = [distorder_pmf(m, t, params, cfg, method) for m in range(n + 1)]
        w1, w2 = params.weights()
        rhs = math.fsum(
            [
                w1 * fractional_difference(vals, params.beta1)[n],
                w2 * fractional_difference(vals, params.beta2)[n],
            ]
        )
        return float(lhs - rhs)
    if variant == "multivariate":
        _check_time(t, 1.0)
        nvec = tuple(int(v) for v in n)
        lhs = multi_sfnb_pmf(nvec, t - 1.0, params, cfg, method) - multi_sfnb_pmf(nvec, t, params, cfg, method)
        return float(lhs - _multi_rhs(nvec, t, params, cfg, method))
    raise ValueError(f"variant must be one of {VARIANTS}")


def _multi_rhs(nvec, t, params, cfg, method):
    """(s^beta/alpha) (I - (1/s) sum_j lam_j B_j)^beta applied at ``nvec``.

    The binomial series in the operator sum_j lam_j B_j / s is expanded
    multinomially; shifts that leave the nonnegative orthant vanish, so the
    sum is finite at total order ``s(nvec)``.
    """
    s_lam = params.s_lambda()
    acc = []
    for lvec in itertools.product(*(range(v + 1) for v in nvec)):
        r = sum(lvec)
        log_w = (
            math.lgamma(r + 1)
            - math.fsum(math.lgamma(l + 1) for l in lvec)
            + math.fsum(l * math.log(lam) for l, lam in zip(lvec, params.lambdas))
            - r * math.log(s_lam)
        )
        coef = (-1) ** r * gen_binomial(params.beta, r) * math.exp(log_w)
        if coef == 0:
            continue
        shifted = tuple(v - l for v, l in zip(nvec, lvec))
        acc.append(coef * multi_sfnb_pmf(shifted, t, params, cfg, method))
    return params.series_ratio() * math.fsum(acc)
