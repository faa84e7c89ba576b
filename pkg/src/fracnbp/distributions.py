"""Univariate distributions of the space-fractional negative binomial family.

Covers the space-fractional Poisson process (SFPP), the SFNB process obtained
by a gamma time change, its distributed-order and Polya-type generalizations,
their pgfs, Laplace exponent and discrete Levy measure.

Series evaluations are gated to their convergence domain and raise
:class:`~fracnbp.errors.DivergentSeries` outside it. ``sfnb_pmf`` can
alternatively invert the closed-form pgf on a contour (``method="contour"``),
which is valid for every parameter value.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import AccuracyLoss, ClampWarning, DivergentSeries, MaxTermsExceeded
from .inversion import pgf_coefficients
from .params import DistOrderParams, PmfTable, PolyaParams, SfnbParams
from .wright import DEFAULT_CONFIG, WrightSpec21, _stop_position, gen_binomial, wright_2psi1

__all__ = [
    "SFPP_CANCELLATION_CAP",
    "sfpp_pmf",
    "sfpp_pgf",
    "nb_pmf",
    "gamma_density",
    "sfnb_pmf",
    "sfnb_pmf_table",
    "sfnb_pgf",
    "sfnb_laplace_exponent",
    "sfnb_levy_measure",
    "compound_x_pgf",
    "distorder_pmf",
    "distorder_pmf_table",
    "distorder_pgf",
    "polya_pmf",
    "polya_pmf_table",
    "polya_pgf",
    "small_increment_prob",
    "adaptive_table",
]

SFPP_CANCELLATION_CAP = 30.0

_METHODS = ("series", "contour", "auto")


def _clamp(value, bound, what):
    """Map tiny negative rounding residue to 0; anything larger is an error."""
    if value >= 0:
        return value
    if -value <= bound:
        warnings.warn(f"{what}: clamped {value:.3e} to 0", ClampWarning, stacklevel=3)
        return 0.0
    raise AccuracyLoss(f"{what}: series returned {value:.3e} < 0 beyond its error bound {bound:.1e}")


def _clamp_array(values, bound, what):
    """Vectorized :func:`_clamp` issuing one warning for the whole array."""
    values = np.asarray(values, dtype=float)
    neg = values < 0
    if not neg.any():
        return values
    worst = float(values[neg].min())
    if -worst > bound:
        raise AccuracyLoss(f"{what}: value {worst:.3e} < 0 beyond its error bound {bound:.1e}")
    warnings.warn(f"{what}: clamped {int(neg.sum())} value(s) down to {worst:.3e} to 0", ClampWarning, stacklevel=3)
    return np.where(neg, 0.0, values)


def _check_n(n):
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    return int(n)


def _check_t(t):
    t = float(t)
    if not (t >= 0 and math.isfinite(t)):
        raise ValueError(f"t must be nonnegative, got {t}")
    return t


# ---------------------------------------------------------------------------
# space-fractional Poisson process and the classical building blocks


def sfpp_pmf(n, t, lam, beta, cfg=None):
    """P(N_beta(t) = n) for the space-fractional Poisson process.

    Alternating series in ``x = lam**beta * t``; double precision cannot
    deliver ``abs_tol`` once ``x`` exceeds :data:`SFPP_CANCELLATION_CAP`.
    """
    cfg = cfg or DEFAULT_CONFIG
    n, t = _check_n(n), _check_t(t)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    x = lam**beta * t
    if x > SFPP_CANCELLATION_CAP:
        raise AccuracyLoss(
            f"lambda^beta * t = {x:.4g} exceeds the cancellation cap {SFPP_CANCELLATION_CAP}"
        )
    spec = WrightSpec21(1.0, beta, 1.0, 0.0, 1.0 - n, beta, -x)
    res = wright_2psi1(spec, cfg, log_scale=-math.lgamma(n + 1), ref_scale=1.0)
    value = res.value if n % 2 == 0 else -res.value
    return _clamp(value, max(cfg.abs_tol, res.error_bound), "sfpp_pmf")


def sfpp_pgf(u, t, lam, beta):
    return np.exp(-(lam**beta) * t * (1.0 - np.asarray(u)) ** beta)


def nb_pmf(n, gamma_shape, eta):
    """Negative binomial ``binom(n + g - 1, n) eta^n (1 - eta)^g``."""
    n = _check_n(n)
    if gamma_shape <= 0:
        raise ValueError("gamma_shape must be positive")
    if not 0 <= eta < 1:
        raise ValueError("eta must lie in [0, 1)")
    if eta == 0:
        return 1.0 if n == 0 else 0.0
    logp = (
        math.lgamma(n + gamma_shape)
        - math.lgamma(gamma_shape)
        - math.lgamma(n + 1)
        + n * math.log(eta)
        + gamma_shape * math.log1p(-eta)
    )
    return math.exp(logp)


def gamma_density(x, alpha, shape):
    """Density of G(alpha, shape): rate ``alpha``, shape ``shape`` (= p t)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("gamma_density is defined for x > 0")
    if alpha <= 0 or shape <= 0:
        raise ValueError("alpha and shape must be positive")
    out = np.exp(shape * math.log(alpha) + (shape - 1) * np.log(x) - alpha * x - math.lgamma(shape))
    return out if out.ndim else float(out)


def small_increment_prob(m, dt, lam, beta):
    """First-order P(N_beta(dt) = m) ~ (-1)^(m+1) binom(beta, m) lam^beta dt."""
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    if not dt > 0:
        raise ValueError("dt must be positive")
    sign = 1.0 if (m + 1) % 2 == 0 else -1.0
    return sign * gen_binomial(beta, int(m)) * lam**beta * dt


# ---------------------------------------------------------------------------
# SFNB process


def _gate_message(ratio, what="lambda^beta/alpha"):
    return f"{what} = {ratio:.6g} >= 1: analytic series diverges; use `simulate`"


def sfnb_pgf(u, t, params):
    """E[u^Q(t)] = (1 + lam^beta (1-u)^beta / alpha)^(-p t); vectorized, complex ok."""
    u = np.asarray(u)
    base = 1.0 + params.lam**params.beta * (1.0 - u) ** params.beta / params.alpha
    out = np.exp(-params.p * t * np.log(base))
    return out if out.ndim else out[()]


# "auto" refuses series values whose own error bound exceeds this
AUTO_ERROR_BOUND = 1e-10


def _sfnb_series(n, pt, params, cfg, max_error=None):
    x = params.series_ratio()
    if x >= 1:
        raise DivergentSeries(_gate_message(x))
    spec = WrightSpec21(1.0, params.beta, pt, 1.0, 1.0 - n, params.beta, -x)
    res = wright_2psi1(spec, cfg, log_scale=-math.lgamma(n + 1) - math.lgamma(pt), ref_scale=1.0)
    if max_error is not None and res.error_bound > max_error:
        raise AccuracyLoss(f"sfnb_pmf: error bound {res.error_bound:.1e} exceeds {max_error:.1e}")
    value = res.value if n % 2 == 0 else -res.value
    return _clamp(value, max(cfg.abs_tol, res.error_bound), "sfnb_pmf")


def _resolve(method, params):
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}")
    if method == "auto":
        return "series" if params.series_ratio() < 1 else "contour"
    return method


def sfnb_pmf(n, t, params, cfg=None, method="series"):
    """P(Q_beta(t) = n) for the SFNB process.

    Parameters
    ----------
    n : int
    t : float
    params : SfnbParams
    cfg : SeriesConfig, optional
    method : {"series", "contour", "auto"}
        ``"series"`` sums the Wright series and requires
        ``lam**beta / alpha < 1``. ``"contour"`` inverts the closed-form pgf
        numerically (absolute error ~1e-16, no gate). ``"auto"`` uses the
        series inside its gate and the contour otherwise, or when the series
        reports cancellation or non-termination.
    """
    cfg = cfg or DEFAULT_CONFIG
    n, t = _check_n(n), _check_t(t)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    if _resolve(method, params) == "contour":
        coef = pgf_coefficients(lambda u: sfnb_pgf(u, t, params), n)
        return _clamp(float(coef[n]), 1e-15, "sfnb_pmf")
    try:
        return _sfnb_series(n, params.p * t, params, cfg, AUTO_ERROR_BOUND if method == "auto" else None)
    except (AccuracyLoss, MaxTermsExceeded):
        if method != "auto":
            raise
    return sfnb_pmf(n, t, params, cfg, method="contour")


def sfnb_pmf_table(n_max, t, params, cfg=None, method="series"):
    """PmfTable on ``0..n_max``."""
    cfg = cfg or DEFAULT_CONFIG
    t = _check_t(t)
    if t > 0 and _resolve(method, params) == "contour":
        coef = pgf_coefficients(lambda u: sfnb_pgf(u, t, params), n_max)
        probs = _clamp_array(coef, 1e-15, "sfnb_pmf")
    elif t > 0 and method == "auto":
        probs = np.empty(n_max + 1)
        coef = None
        for n in range(n_max + 1):
            try:
                probs[n] = _sfnb_series(n, params.p * t, params, cfg, AUTO_ERROR_BOUND)
            except (AccuracyLoss, MaxTermsExceeded):
                if coef is None:
                    coef = pgf_coefficients(lambda u: sfnb_pgf(u, t, params), n_max)
                probs[n] = _clamp(float(coef[n]), 1e-15, "sfnb_pmf")
    else:
        probs = np.array([sfnb_pmf(n, t, params, cfg, method="series") for n in range(n_max + 1)])
    return PmfTable(np.arange(n_max + 1), probs)


def sfnb_laplace_exponent(u, params):
    """psi(u) = p ln(1 + lam^beta (1 - e^-u)^beta / alpha); ``u = inf`` allowed."""
    u = float(u)
    if u < 0:
        raise ValueError("u must be nonnegative")
    s = -math.expm1(-u)
    return params.p * math.log1p(params.lam**params.beta * s**params.beta / params.alpha)


def _levy_contour(k_max, params):
    """nu(1..k_max) as minus the coefficients of p ln(1 + lam^beta (1-s)^beta / alpha)."""
    def fn(s):
        return -params.p * np.log(1.0 + params.lam**params.beta * (1.0 - s) ** params.beta / params.alpha)

    return pgf_coefficients(fn, k_max)


def sfnb_levy_measure(k, params, cfg=None, method="series"):
    """Mass of the discrete Levy measure at jump size ``k >= 1``.

    ``method`` works as in :func:`sfnb_pmf`; the contour variant expands the
    Laplace exponent in ``s = e^-u``, whose ``s^k`` coefficient is ``-nu(k)``.
    """
    cfg = cfg or DEFAULT_CONFIG
    k = _check_n(k)
    if k < 1:
        raise ValueError("the Levy measure lives on k >= 1")
    if _resolve(method, params) == "series":
        x = params.series_ratio()
        if x >= 1:
            raise DivergentSeries(_gate_message(x))
        spec = WrightSpec21(1.0, params.beta, 0.0, 1.0, 1.0 - k, params.beta, -x)
        try:
            res = wright_2psi1(
                spec, cfg, start=1, log_scale=math.log(params.p) - math.lgamma(k + 1), ref_scale=params.p
            )
            if method == "auto" and res.error_bound > AUTO_ERROR_BOUND * params.p:
                raise AccuracyLoss("sfnb_levy_measure: error bound too loose")
            value = res.value if k % 2 == 0 else -res.value
            return _clamp(value, max(cfg.abs_tol, res.error_bound), "sfnb_levy_measure")
        except (AccuracyLoss, MaxTermsExceeded):
            if method != "auto":
                raise
    coef = _levy_contour(k, params)
    return _clamp(float(coef[k]), 1e-15 * params.p, "sfnb_levy_measure")


def compound_x_pgf(u, params):
    """pgf of the i.i.d. summands in the compound-sum representation.

    ``G_X(u) = 1 - lam^-1 [ln(1 + lam^beta (1-u)^beta / alpha)]^(1/beta)``.
    The prefactor is ``1/lam`` (not ``1/lam^beta``) so that the SFPP pgf
    ``exp(-lam^beta t (1 - G_X)^beta)`` reproduces the SFNB pgf with ``p = 1``.
    """
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1):
        raise ValueError("u must lie in [-1, 1]")
    bracket = np.log1p(params.lam**params.beta * (1.0 - u) ** params.beta / params.alpha)
    out = 1.0 - bracket ** (1.0 / params.beta) / params.lam
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# distributed order


def distorder_pgf(u, t, params):
    w1, w2 = params.weights()
    one_minus = 1.0 - np.asarray(u)
    base = 1.0 + w1 * one_minus**params.beta1 + w2 * one_minus**params.beta2
    out = np.exp(-params.p * t * np.log(base))
    return out if out.ndim else out[()]


def distorder_pmf(n, t, params, cfg=None, method="series"):
    """pmf of the SFNB process whose index is beta1 w.p. a1 and beta2 w.p. a2.

    Outer sum over ``r`` of ``(-w1)^r / r!`` times an inner Wright series in
    ``-w2`` with ``w_i = a_i lam^beta_i / alpha``; both are truncated with the
    kernel's three-small-terms rule. ``method`` behaves as in :func:`sfnb_pmf`
    with the gate ``w1 + w2 < 1``.
    """
    cfg = cfg or DEFAULT_CONFIG
    n, t = _check_n(n), _check_t(t)
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}")
    if t == 0:
        return 1.0 if n == 0 else 0.0
    if method != "series" and (method == "contour" or sum(params.weights()) >= 1):
        coef = pgf_coefficients(lambda u: distorder_pgf(u, t, params), n)
        return _clamp(float(coef[n]), 1e-15, "distorder_pmf")
    try:
        return _distorder_series(n, t, params, cfg, AUTO_ERROR_BOUND if method == "auto" else None)
    except (AccuracyLoss, MaxTermsExceeded):
        if method != "auto":
            raise
    return distorder_pmf(n, t, params, cfg, method="contour")


def _distorder_series(n, t, params, cfg, max_error=None):
    w1, w2 = params.weights()
    if w1 + w2 >= 1:
        raise DivergentSeries(_gate_message(w1 + w2, "(a1 lam^beta1 + a2 lam^beta2)/alpha"))
    pt = params.p * t
    base_scale = -math.lgamma(n + 1) - math.lgamma(pt)

    def outer_term(r):
        scale = base_scale - math.lgamma(r + 1) + (r * math.log(w1) if r else 0.0)
        spec = WrightSpec21(
            1.0 + params.beta1 * r, params.beta2, pt + r, 1.0, 1.0 - n + params.beta1 * r, params.beta2, -w2
        )
        res = wright_2psi1(spec, cfg, log_scale=scale, ref_scale=1.0)
        sign = -1.0 if (n + r) % 2 else 1.0
        return sign * res.value, res.error_bound

    if w1 == 0:
        v, e = outer_term(0)
        terms, errs = [v], [e]
    else:
        k_min = int(math.ceil(max(n + pt - 1.0, 0.0) / -math.log(w1 + w2)))
        terms, errs = [], []
        stop = None
        while stop is None:
            r = len(terms)
            if r >= cfg.max_terms:
                raise MaxTermsExceeded(f"outer series did not truncate within {cfg.max_terms} terms")
            v, e = outer_term(r)
            terms.append(v)
            errs.append(e)
            if r >= k_min + 2:
                mags = np.abs(np.asarray(terms))
                ks = np.arange(len(terms))
                stop = _stop_position(mags, mags == 0, ks, k_min, cfg.abs_tol)
        terms, errs = terms[: stop + 1], errs[: stop + 1]
    value = math.fsum(terms)
    max_term = max(abs(v) for v in terms)
    if max_term / max(abs(value), 1.0) > cfg.cancellation_guard:
        raise AccuracyLoss("distorder_pmf: outer series cancellation exceeds guard")
    err = math.fsum(errs)
    if max_error is not None and err > max_error:
        raise AccuracyLoss(f"distorder_pmf: error bound {err:.1e} exceeds {max_error:.1e}")
    return _clamp(value, max(cfg.abs_tol, err), "distorder_pmf")


def distorder_pmf_table(n_max, t, params, cfg=None, method="series"):
    """PmfTable on ``0..n_max``; ``method`` as in :func:`distorder_pmf`."""
    cfg = cfg or DEFAULT_CONFIG
    t = _check_t(t)
    outside = sum(params.weights()) >= 1
    if t > 0 and (method == "contour" or (method == "auto" and outside)):
        coef = pgf_coefficients(lambda u: distorder_pgf(u, t, params), n_max)
        probs = _clamp_array(coef, 1e-15, "distorder_pmf")
    elif t > 0 and method == "auto":
        probs = np.empty(n_max + 1)
        coef = None
        for n in range(n_max + 1):
            try:
                probs[n] = _distorder_series(n, t, params, cfg, AUTO_ERROR_BOUND)
            except (AccuracyLoss, MaxTermsExceeded):
                if coef is None:
                    coef = pgf_coefficients(lambda u: distorder_pgf(u, t, params), n_max)
                probs[n] = _clamp(float(coef[n]), 1e-15, "distorder_pmf")
    else:
        probs = np.array([distorder_pmf(n, t, params, cfg, method) for n in range(n_max + 1)])
    return PmfTable(np.arange(n_max + 1), probs)


# ---------------------------------------------------------------------------
# Polya-type


def polya_pmf(n, t, params, cfg=None):
    """pmf of the Polya-type process ``N_beta(u, Y(t)**d)`` at time ``t``."""
    cfg = cfg or DEFAULT_CONFIG
    n, t = _check_n(n), _check_t(t)
    if t == 0 or params.u == 0:
        return 1.0 if n == 0 else 0.0
    pt = params.p * t
    bd = params.beta * params.d
    z = -params.u * params.lam**bd
    spec = WrightSpec21(1.0, params.beta, pt, bd, 1.0 - n, params.beta, z)
    res = wright_2psi1(spec, cfg, log_scale=-math.lgamma(n + 1) - math.lgamma(pt), ref_scale=1.0)
    value = res.value if n % 2 == 0 else -res.value
    return _clamp(value, max(cfg.abs_tol, res.error_bound), "polya_pmf")


def polya_pmf_table(n_max, t, params, cfg=None):
    probs = np.array([polya_pmf(n, t, params, cfg) for n in range(n_max + 1)])
    return PmfTable(np.arange(n_max + 1), probs)


def polya_pgf(s, t, params):
    """E[s^W(t)] by quadrature of the SFPP pgf against the gamma law of Y(t)."""
    s = float(s)
    if abs(s) > 1:
        raise ValueError("s must lie in [-1, 1]")
    if t == 0 or params.u == 0 or s == 1:
        return 1.0
    pt = params.p * t
    c = params.u * (1.0 - s) ** params.beta
    bd = params.beta * params.d

    # Y = lam * G with G ~ Gamma(pt, 1)
    def integrand(g):
        return math.exp(-c * (params.lam * g) ** bd + (pt - 1) * math.log(g) - g - math.lgamma(pt))

    val, _ = integrate.quad(integrand, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


# ---------------------------------------------------------------------------


def adaptive_table(table_fn, target=1e-8, n_start=32, n_cap=4096):
    """Grow ``n_max`` by doubling until ``truncation_mass < target`` or ``n_cap``.

    ``table_fn(n_max)`` must return a :class:`PmfTable`. A series failure at a
    larger support ends the search and the last good table is returned.
    """
    n_max = n_start
    table = table_fn(n_max)
    while table.truncation_mass >= target and n_max < n_cap:
        n_max = min(2 * n_max, n_cap)
        try:
            table = table_fn(n_max)
        except (AccuracyLoss, MaxTermsExceeded):
            break
    return table
