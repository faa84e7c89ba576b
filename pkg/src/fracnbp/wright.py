"""Gamma-family helpers and the generalized Wright function 2Psi1.

All series in the package are alternating, so terms are formed in log space
(gamma ratios cross poles for small indices), summed with ``math.fsum`` and
checked for cancellation before a value is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import AccuracyLoss, DivergentSeries, MaxTermsExceeded

__all__ = [
    "SeriesConfig",
    "DEFAULT_CONFIG",
    "WrightSpec21",
    "WrightResult",
    "log_gamma",
    "recip_gamma",
    "gen_binomial",
    "wright_2psi1",
]

_EPS = np.finfo(float).eps
# tolerance used when deciding that Delta == -1 or that an argument sits on a pole
_DELTA_TOL = 1e-12
_POLE_TOL = 1e-12


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation and accuracy policy shared by every series evaluation.

    Parameters
    ----------
    abs_tol : float
        A term counts as negligible once its magnitude drops below this.
    max_terms : int
        Hard cap on the number of terms summed.
    cancellation_guard : float
        Largest allowed ratio ``max|term| / |result|`` before the result is
        declared inaccurate.
    """

    abs_tol: float = 1e-14
    max_terms: int = 2000
    cancellation_guard: float = 1e8

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be > 0")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError("max_terms must be a positive integer")
        if not self.cancellation_guard >= 1:
            raise ValueError("cancellation_guard must be >= 1")

    def to_dict(self):
        return {
            "abs_tol": self.abs_tol,
            "max_terms": int(self.max_terms),
            "cancellation_guard": self.cancellation_guard,
        }


DEFAULT_CONFIG = SeriesConfig()


@dataclass(frozen=True)
class WrightSpec21:
    """Parameters of ``2Psi1[z | (a1, alpha1), (a2, alpha2); (b1, beta1)]``."""

    a1: float
    alpha1: float
    a2: float
    alpha2: float
    b1: float
    beta1: float
    z: float

    def delta_index(self):
        return self.beta1 - self.alpha1 - self.alpha2

    def scale_const(self):
        def powabs(x, e):
            return 1.0 if x == 0 else abs(x) ** e

        return (
            powabs(self.alpha1, -self.alpha1)
            * powabs(self.alpha2, -self.alpha2)
            * powabs(self.beta1, self.beta1)
        )


@dataclass(frozen=True)
class WrightResult:
    """Value of a truncated Wright series plus its diagnostics.

    ``cancellation`` is ``max_term / reference`` where the reference is either
    ``|value|`` or the caller-provided ``ref_scale``. ``error_bound`` combines
    the rounding error of every term with the estimated truncation tail.
    """

    value: float
    terms_used: int
    tail_bound: float
    max_term: float
    cancellation: float
    error_bound: float

    def __float__(self):
        return float(self.value)


def log_gamma(x):
    """Return ``ln Gamma(x)`` for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}; use recip_gamma")
    return math.lgamma(x)


def recip_gamma(x):
    """Return ``1/Gamma(x)``; exactly 0 at nonpositive integers."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        return 0.0
    return float(special.rgamma(x))


def _is_nonpositive_integer(x):
    r = np.round(x)
    return (r <= 0) & (np.abs(x - r) <= _POLE_TOL * np.maximum(1.0, np.abs(x)))


def gen_binomial(a, n):
    """Generalized binomial coefficient ``binom(a, n)``.

    Zero whenever ``a - n + 1`` is a negative integer; otherwise the falling
    product ``prod_{j<n} (a - j) / n!`` (no gamma overflow). The product
    already vanishes when ``a - n + 1 = 0`` with ``n >= 1`` and is 1 for
    ``n = 0``.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    a = float(a)
    m = a - n + 1
    if m <= -1 and m == math.floor(m):
        return 0.0
    out = 1.0
    for j in range(n):
        out *= (a - j) / (j + 1)
    return out


def _check_convergence(spec):
    delta = spec.delta_index()
    if delta > -1 + _DELTA_TOL:
        return
    if abs(delta + 1) <= _DELTA_TOL:
        d = spec.scale_const()
        if abs(spec.z) < d:
            return
        raise DivergentSeries(
            f"2Psi1 diverges: Delta = -1 and |z| = {abs(spec.z):.6g} >= delta = {d:.6g}"
        )
    raise DivergentSeries(f"2Psi1 diverges: Delta = {delta:.6g} < -1")


def _peak_index(spec):
    """Index after which term magnitudes are asymptotically decreasing.

    Stirling gives ``|term_k| ~ k**c * (|z|/delta)**k`` when Delta = -1 with
    ``c = a1 + a2 - b1 - 1``, and superexponential decay past
    ``(|z|/delta)**(1/(1+Delta))`` otherwise.
    """
    z = abs(spec.z)
    if z == 0:
        return 0
    delta = spec.delta_index()
    d = spec.scale_const()
    if abs(delta + 1) <= _DELTA_TOL:
        c = spec.a1 + spec.a2 - spec.b1 - 1.0
        return int(math.ceil(c / math.log(d / z))) if c > 0 else 0
    return int(math.ceil((z / d) ** (1.0 / (1.0 + delta))))


def _two_product(a, b):
    """``a * b`` and its exact rounding error (Dekker's splitting)."""
    p = a * b

    def split(x):
        c = 134217729.0 * x
        hi = c - (c - x)
        return hi, x - hi

    ah, al = split(a)
    bh, bl = split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _log_recip_gamma(b1, beta1, k):
    """``ln|1/Gamma(B)|``, its sign and the pole mask for ``B = b1 + beta1 k``.

    Near a nonpositive integer ``r`` the offset ``B - r`` is formed without
    rounding ``beta1 * k`` first, and ``1/Gamma`` is taken from the reflection
    formula ``Gamma(1 - B) sin(pi B) / pi`` so the relative error stays at
    machine precision however close ``B`` comes to the pole.
    """
    prod, err = _two_product(np.full_like(k, beta1), k)
    B = b1 + prod
    r = np.round(B)
    frac = ((b1 - r) + prod) + err
    pole = _is_nonpositive_integer(B)
    left = (B < 0.5) & ~pole
    out = np.zeros_like(B)
    sign = np.ones_like(B)
    right = ~left & ~pole
    out[right] = -special.gammaln(B[right])
    if np.any(left):
        s = np.sin(np.pi * frac[left])
        out[left] = special.gammaln((1.0 - r[left]) - frac[left]) + np.log(np.abs(s)) - math.log(math.pi)
        sign[left] = np.sign(s) * np.where(r[left] % 2 == 0, 1.0, -1.0)
    return out, sign, pole


def _terms(spec, k, log_scale):
    """Signed terms, rounding-error magnitudes and pole mask for indices ``k``."""
    A1 = spec.a1 + spec.alpha1 * k
    A2 = spec.a2 + spec.alpha2 * k
    if np.any(_is_nonpositive_integer(A1) | _is_nonpositive_integer(A2)):
        raise ValueError("numerator gamma argument hits a pole; raise `start`")
    lrb, sgnb, pole = _log_recip_gamma(spec.b1, spec.beta1, k)
    lg1 = special.gammaln(A1)
    lg2 = special.gammaln(A2)
    lgk = special.gammaln(k + 1.0)
    zlog = k * math.log(abs(spec.z))
    logmag = lg1 + lg2 + lrb - lgk + zlog + log_scale
    mag = np.where(pole, 0.0, np.exp(logmag))
    sign = special.gammasgn(A1) * special.gammasgn(A2) * sgnb
    if spec.z < 0:
        sign = sign * np.where(k % 2 == 0, 1.0, -1.0)
    # exp() of a log assembled from large pieces carries their absolute error
    rel = _EPS * (np.abs(lg1) + np.abs(lg2) + np.abs(lrb) + lgk + np.abs(zlog) + abs(log_scale) + 4.0)
    return sign * mag, mag * rel, pole


def _stop_position(mags, pole, k, k_min, tol):
    """First position at which three consecutive non-pole terms are small and decreasing."""
    idx = np.flatnonzero(~pole)
    if idx.size < 3:
        return None
    m = mags[idx]
    small = m < tol
    dec = np.ones_like(small)
    dec[1:] = m[1:] <= m[:-1]
    ok = small & dec & (k[idx] >= k_min)
    run = ok[2:] & ok[1:-1] & ok[:-2]
    hits = np.flatnonzero(run)
    if hits.size == 0:
        return None
    return int(idx[hits[0] + 2])


def wright_2psi1(spec, cfg=None, *, start=0, log_scale=0.0, ref_scale=None):
    """Evaluate ``sum_{k>=start} G(a1+al1 k) G(a2+al2 k) / G(b1+be1 k) z^k / k!``.

    Every term is multiplied by ``exp(log_scale)`` before truncation, so
    ``abs_tol`` applies on the scale of the quantity the caller returns.

    Parameters
    ----------
    spec : WrightSpec21
    cfg : SeriesConfig, optional
    start : int
        First summation index (use 1 to drop a numerator pole at k = 0).
    log_scale : float
        Log of a positive constant prefactor.
    ref_scale : float, optional
        Magnitude against which cancellation is judged; defaults to ``|value|``.
        Probability-valued callers pass 1.0 since their error is absolute.

    Returns
    -------
    WrightResult

    Raises
    ------
    DivergentSeries
        Delta < -1, or Delta = -1 with ``|z| >= delta``.
    AccuracyLoss
        ``max|term| / reference > cfg.cancellation_guard``, or the rounding
        part of ``error_bound`` exceeds ``cancellation_guard * eps * reference``.
    MaxTermsExceeded
        Truncation did not trigger within ``cfg.max_terms`` terms.
    """
    cfg = DEFAULT_CONFIG if cfg is None else cfg
    _check_convergence(spec)
    if spec.z == 0:
        if start > 0:
            return WrightResult(0.0, 0, 0.0, 0.0, 0.0, 0.0)
        t, e, _ = _terms(
            WrightSpec21(spec.a1, spec.alpha1, spec.a2, spec.alpha2, spec.b1, spec.beta1, 1.0),
            np.zeros(1),
            log_scale,
        )
        v = float(t[0])
        return WrightResult(v, 1, 0.0, abs(v), 1.0 if v else 0.0, float(e[0]))

    k_min = max(start, _peak_index(spec))
    limit = start + int(cfg.max_terms)
    if k_min >= limit:
        raise MaxTermsExceeded(
            f"series peaks near k={k_min}, beyond max_terms={cfg.max_terms}"
        )
    terms, errs, poles, ks = [], [], [], []
    k0, chunk = start, 64
    stop = None
    while stop is None:
        if k0 >= limit:
            raise MaxTermsExceeded(f"no truncation within {cfg.max_terms} terms")
        k = np.arange(k0, min(k0 + chunk, limit), dtype=float)
        t, e, p = _terms(spec, k, log_scale)
        terms.append(t)
        errs.append(e)
        poles.append(p)
        ks.append(k)
        tt = np.concatenate(terms)
        stop = _stop_position(np.abs(tt), np.concatenate(poles), np.concatenate(ks), k_min, cfg.abs_tol)
        k0 = int(k[-1]) + 1
        chunk = min(2 * chunk, 1024)

    tt = np.concatenate(terms)[: stop + 1]
    ee = np.concatenate(errs)[: stop + 1]
    nz = np.abs(tt[~np.concatenate(poles)[: stop + 1]])
    q = nz[-1] / nz[-2] if nz[-2] > 0 else 0.0
    q = min(q, 0.999)
    tail = float(nz[-1] * q / (1.0 - q))
    value = math.fsum(tt.tolist())
    max_term = float(np.max(np.abs(tt)))
    ref = abs(value) if ref_scale is None else max(abs(value), ref_scale)
    if ref > 0:
        ratio = max_term / ref
    else:
        ratio = math.inf if max_term > 0 else 0.0
    if ratio > cfg.cancellation_guard:
        raise AccuracyLoss(
            f"cancellation ratio {ratio:.3g} exceeds guard {cfg.cancellation_guard:.3g}"
        )
    # the same budget applied to the propagated rounding error, which also
    # grows with the size of the log-gamma arguments
    rounding = math.fsum(ee.tolist())
    if ref > 0 and rounding > cfg.cancellation_guard * _EPS * ref:
        raise AccuracyLoss(
            f"rounding error bound {rounding:.3g} exceeds guard * eps * {ref:.3g}"
        )
    return WrightResult(
        value=value,
        terms_used=int(stop + 1),
        tail_bound=tail,
        max_term=max_term,
        cancellation=ratio,
        error_bound=rounding + tail,
    )
