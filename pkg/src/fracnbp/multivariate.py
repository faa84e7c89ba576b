"""d-dimensional SFNB process: d independent SFPP components on one gamma clock."""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import special

from .distributions import _clamp, _check_t, _gate_message, sfnb_pmf, sfnb_pmf_table
from .errors import DivergentSeries, InvalidSupport
from .params import MultiParams, PmfTable, SfnbParams
from .wright import DEFAULT_CONFIG, WrightSpec21, wright_2psi1

__all__ = [
    "multi_sfnb_pmf",
    "multi_pmf_table",
    "multi_pgf",
    "multi_laplace_exponent",
    "multi_levy_measure",
    "multi_nb_pmf",
    "simplex_grid",
]


def _nvec(nvec, dim):
    n = np.asarray(nvec)
    if n.shape != (dim,) or np.any(n < 0) or np.any(n != np.round(n)):
        raise ValueError(f"nvec must be {dim} nonnegative integers, got {nvec}")
    return tuple(int(v) for v in n)


def _log_multinomial_weight(n, lambdas, s_lam):
    """log of prod(lam_i^n_i / n_i!) / s(lam)^s(n), the n-dependent prefactor."""
    return math.fsum(
        ni * math.log(li) - math.lgamma(ni + 1) for ni, li in zip(n, lambdas)
    ) - sum(n) * math.log(s_lam)


def _gate(params):
    x = params.series_ratio()
    if x >= 1:
        raise DivergentSeries(_gate_message(x, "s(lambda)^beta/alpha"))
    return x


def _total_params(params):
    # the total count s(n) is univariate SFNB with p = 1 and rate s(lambda)
    return SfnbParams(params.beta, params.alpha, 1.0, params.s_lambda())


def multi_sfnb_pmf(nvec, t, params, cfg=None, method="series"):
    """Joint P(Q^1(t) = n_1, ..., Q^d(t) = n_d).

    ``method="series"`` sums the Wright series for the vector directly;
    ``"contour"`` and ``"auto"`` evaluate the pmf of the total ``s(n)`` with
    :func:`sfnb_pmf` and split it multinomially (Poisson thinning).
    """
    cfg = cfg or DEFAULT_CONFIG
    n = _nvec(nvec, params.dim)
    t = _check_t(t)
    if t == 0:
        return 1.0 if not any(n) else 0.0
    s = sum(n)
    if method != "series":
        total = sfnb_pmf(s, t, _total_params(params), cfg, method)
        return total * math.exp(math.lgamma(s + 1) + _log_multinomial_weight(n, params.lambdas, params.s_lambda()))
    x = _gate(params)
    scale = _log_multinomial_weight(n, params.lambdas, params.s_lambda()) - math.lgamma(t)
    spec = WrightSpec21(1.0, params.beta, t, 1.0, 1.0 - s, params.beta, -x)
    res = wright_2psi1(spec, cfg, log_scale=scale, ref_scale=1.0)
    value = res.value if s % 2 == 0 else -res.value
    return _clamp(value, max(cfg.abs_tol, res.error_bound), "multi_sfnb_pmf")


def simplex_grid(dim, total_max):
    """All count vectors with ``sum(n) <= total_max``, ordered by total then lexicographically."""
    out = []
    for s in range(total_max + 1):
        for cut in itertools.combinations(range(s + dim - 1), dim - 1):
            bounds = (-1,) + cut + (s + dim - 1,)
            out.append(tuple(bounds[i + 1] - bounds[i] - 1 for i in range(dim)))
    return np.array(out, dtype=np.int64).reshape(-1, dim)


def multi_pmf_table(total_max, t, params, cfg=None, method="series"):
    """Joint pmf on :func:`simplex_grid`; ``method`` as in :func:`multi_sfnb_pmf`."""
    grid = simplex_grid(params.dim, total_max)
    if method == "series":
        probs = np.array([multi_sfnb_pmf(n, t, params, cfg) for n in grid])
        return PmfTable(grid, probs)
    totals = sfnb_pmf_table(total_max, t, _total_params(params), cfg, method).probs
    lam = np.asarray(params.lambdas, dtype=float)
    s = grid.sum(axis=1)
    log_w = special.gammaln(s + 1) + (grid * np.log(lam / params.s_lambda()) - special.gammaln(grid + 1)).sum(axis=1)
    return PmfTable(grid, totals[s] * np.exp(log_w))


def multi_pgf(uvec, t, params):
    """(1 + [sum lam_j (1 - u_j)]^beta / alpha)^(-t)."""
    u = np.asarray(uvec, dtype=float)
    if u.shape != (params.dim,) or np.any(np.abs(u) > 1):
        raise ValueError("uvec must hold one value in [-1, 1] per component")
    inner = math.fsum(l * (1.0 - v) for l, v in zip(params.lambdas, u))
    return math.exp(-t * math.log1p(inner**params.beta / params.alpha))


def multi_laplace_exponent(uvec, params):
    u = np.asarray(uvec, dtype=float)
    inner = math.fsum(l * -math.expm1(-v) for l, v in zip(params.lambdas, u))
    return math.log1p(inner**params.beta / params.alpha)


def multi_levy_measure(nvec, params, cfg=None):
    """Levy measure mass at the count vector ``nvec`` (not all zero)."""
    cfg = cfg or DEFAULT_CONFIG
    n = _nvec(nvec, params.dim)
    if not any(n):
        raise InvalidSupport("the Levy measure has no mass at the zero vector")
    x = _gate(params)
    s = sum(n)
    scale = _log_multinomial_weight(n, params.lambdas, params.s_lambda())
    spec = WrightSpec21(1.0, params.beta, 0.0, 1.0, 1.0 - s, params.beta, -x)
    res = wright_2psi1(spec, cfg, start=1, log_scale=scale, ref_scale=1.0)
    value = res.value if s % 2 == 0 else -res.value
    return _clamp(value, max(cfg.abs_tol, res.error_bound), "multi_levy_measure")


def multi_nb_pmf(nvec, t, params):
    """Closed-form joint pmf of the multivariate NB process (``beta = 1``)."""
    if params.beta != 1:
        raise ValueError("closed form holds for beta = 1 only")
    n = _nvec(nvec, params.dim)
    s, sl, a = sum(n), params.s_lambda(), params.alpha
    logp = (
        t * math.log(a)
        + math.lgamma(s + 1)
        - (s + t) * math.log(a + sl)
        + math.lgamma(s + t) - math.lgamma(t) - math.lgamma(s + 1)
        + math.fsum(ni * math.log(li) - math.lgamma(ni + 1) for ni, li in zip(n, params.lambdas))
    )
    return math.exp(logp)
