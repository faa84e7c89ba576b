"""Path simulation by triple subordination: Poisson(stable(gamma(t))).

Random numbers come from numpy's ``PCG64`` bit generator keyed by
``SeedSequence(seed, spawn_key=(stream_id,))``. Gamma variates use numpy's
``Generator.standard_gamma`` (Marsaglia-Tsang squeeze/rejection); uniforms and
exponentials are drawn explicitly so the algorithms below read as written.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EventBudgetExceeded
from .params import MultiParams

__all__ = [
    "DEFAULT_EVENT_BUDGET",
    "RngStream",
    "TimeGrid",
    "SamplePath",
    "interarrival_from_uniform",
    "sim_poisson_arrivals",
    "poisson_count",
    "sim_gamma_path",
    "kanter_transform",
    "sample_stable_unit",
    "sim_stable_path",
    "sim_sfnb_path",
    "sim_multi_sfnb",
    "sample_sfnb",
    "sample_multi_sfnb",
    "simulate_paths",
]

DEFAULT_EVENT_BUDGET = 10_000_000
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream; identical ``(seed, stream_id)`` gives identical draws."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.stream_id) < 0:
            raise ValueError("stream_id must be nonnegative")

    def generator(self):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))


def _gen(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


@dataclass(frozen=True)
class TimeGrid:
    """Observation times ``t_1 < ... < t_n`` (``t_0 = 0`` is implicit)."""

    points: tuple

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("a grid needs at least one point")
        if pts[0] < 0 or np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be nonnegative and strictly increasing")
        object.__setattr__(self, "points", tuple(float(v) for v in pts))

    @classmethod
    def uniform(cls, horizon, steps):
        h = float(horizon) / int(steps)
        return cls(tuple(h * np.arange(1, int(steps) + 1)))

    @property
    def array(self):
        return np.asarray(self.points)

    def step(self):
        """Common spacing ``h = t_1 = t_2 - t_1 = ...``; raises if not uniform."""
        pts = self.array
        h = pts[0]
        gaps = np.diff(np.concatenate([[0.0], pts]))
        if not np.allclose(gaps, h, rtol=1e-9, atol=0):
            raise ValueError("gamma sequential sampling needs a uniform grid starting at h")
        return h


@dataclass
class SamplePath:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values)
        if self.values.shape[0] != self.times.shape[0]:
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.values, axis=0) < 0):
            raise ValueError("sample paths must be nondecreasing")


# ---------------------------------------------------------------------------
# Poisson process


def interarrival_from_uniform(u, lam):
    return -np.log1p(-np.asarray(u)) / lam


def sim_poisson_arrivals(lam, horizon, rng, max_events=DEFAULT_EVENT_BUDGET):
    """Arrival times in ``[0, horizon]`` from exponential gaps ``-ln(1-U)/lam``."""
    if not lam > 0 or not horizon >= 0:
        raise ValueError("need lam > 0 and horizon >= 0")
    mean = lam * horizon
    if mean > max_events:
        raise EventBudgetExceeded(
            f"lambda * horizon = {mean:.4g} exceeds the event budget {max_events:.4g}"
        )
    g = _gen(rng)
    arrivals = []
    last = 0.0
    chunk = int(mean + 5 * math.sqrt(mean) + 16)
    while True:
        x = last + np.cumsum(interarrival_from_uniform(g.random(chunk), lam))
        keep = x[x <= horizon]
        arrivals.append(keep)
        if keep.size < x.size:
            break
        last = x[-1]
        chunk = max(16, int(5 * math.sqrt(mean) + 16))
    return np.concatenate(arrivals)


def poisson_count(arrivals, t):
    """Number of arrivals ``<= t`` (right-continuous)."""
    return np.searchsorted(arrivals, t, side="right")


# ---------------------------------------------------------------------------
# subordinators


def sim_gamma_path(alpha, p, grid, rng):
    """Gamma subordinator on a uniform grid: i.i.d. G(alpha, p h) increments."""
    h = grid.step()
    g = _gen(rng)
    q = g.standard_gamma(p * h, size=len(grid.points)) / alpha
    return SamplePath(grid.array, np.cumsum(q))


def kanter_transform(u, w, beta):
    """Map ``U ~ U(0, pi)``, ``W ~ Exp(1)`` to a unit beta-stable variate.

    Evaluated through log-sines so neither ``beta`` near 0 nor ``u`` at the
    interval ends overflows.
    """
    u = np.asarray(u, dtype=float)
    w = np.maximum(np.asarray(w, dtype=float), _TINY)
    log_a = (np.log(np.sin(beta * u)) - np.log(np.sin(u))) / (1.0 - beta) + np.log(
        np.sin((1.0 - beta) * u)
    ) - np.log(np.sin(beta * u))
    return np.exp((1.0 - beta) / beta * (log_a - np.log(w)))


def sample_stable_unit(beta, rng, size=None):
    """Kanter draw of D_beta(1), Laplace transform exp(-s^beta); 0 < beta < 1."""
    if not 0 < beta < 1:
        raise ValueError("Kanter's formula needs 0 < beta < 1; beta = 1 is the identity clock")
    g = _gen(rng)
    n = 1 if size is None else size
    u = math.pi * (1.0 - g.random(n))  # (0, pi]
    w = g.standard_exponential(n)
    d = kanter_transform(u, w, beta)
    return float(d[0]) if size is None else d


def sim_stable_path(beta, time_points, rng):
    """beta-stable subordinator at the given times, ``D(0) = 0``.

    Increments are ``(t_i - t_{i-1})^(1/beta) D_beta(1)``; repeated times
    give zero increments.
    """
    t = np.asarray(time_points, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] < 0 or np.any(np.diff(t) < 0):
        raise ValueError("time points must be nonnegative and increasing")
    dt = np.diff(np.concatenate([[0.0], t]))
    inc = dt ** (1.0 / beta) * sample_stable_unit(beta, rng, size=t.size)
    return SamplePath(t, np.cumsum(inc))


def _clock(beta, alpha, p, grid, g):
    """Gamma clock then stable clock evaluated at it: D_beta(Y(t_i))."""
    y = sim_gamma_path(alpha, p, grid, g).values
    if beta == 1:
        return y
    return sim_stable_path(beta, y, g).values


def sim_sfnb_path(params, grid, rng, max_events=DEFAULT_EVENT_BUDGET):
    """SFNB path N(D_beta(Y(t_i))) on a uniform grid; beta = 1 skips the stable layer."""
    g = _gen(rng)
    clock = _clock(params.beta, params.alpha, params.p, grid, g)
    arrivals = sim_poisson_arrivals(params.lam, clock[-1], g, max_events)
    return SamplePath(grid.array, poisson_count(arrivals, clock).astype(np.int64))


def sim_multi_sfnb(params, grid, rng, max_events=DEFAULT_EVENT_BUDGET):
    """d components sharing one gamma clock and one stable clock (``p = 1``).

    Returns a SamplePath whose values have shape ``(len(grid), d)``.
    """
    g = _gen(rng)
    clock = _clock(params.beta, params.alpha, 1.0, grid, g)
    total = sum(params.lambdas) * clock[-1]
    if total > max_events:
        raise EventBudgetExceeded(f"expected {total:.4g} events exceed the budget {max_events:.4g}")
    cols = [poisson_count(sim_poisson_arrivals(lam, clock[-1], g, max_events), clock) for lam in params.lambdas]
    return SamplePath(grid.array, np.column_stack(cols).astype(np.int64))


def simulate_paths(params, grid, n_paths, seed, max_events=DEFAULT_EVENT_BUDGET):
    """``n_paths`` independent paths; path ``i`` uses ``RngStream(seed, i)``."""
    sim = sim_multi_sfnb if isinstance(params, MultiParams) else sim_sfnb_path
    return [sim(params, grid, RngStream(seed, i), max_events) for i in range(int(n_paths))]


# ---------------------------------------------------------------------------
# marginal samplers for Monte Carlo validation


def _clock_at(beta, alpha, shape, size, g):
    y = g.standard_gamma(shape, size=size) / alpha
    if beta == 1:
        return y
    # a one-point stable path at time y has increment y^(1/beta) D_beta(1)
    return y ** (1.0 / beta) * sample_stable_unit(beta, g, size=size)


def sample_sfnb(params, t, size, rng, max_rate=1e15):
    """``size`` independent draws of Q_beta(t).

    Same composition as :func:`sim_sfnb_path` at one time point; the Poisson
    count on ``[0, D]`` is drawn as Poisson(lam D), which is the law of the
    number of exponential arrivals before ``D``.
    """
    g = _gen(rng)
    rate = params.lam * _clock_at(params.beta, params.alpha, params.p * t, size, g)
    if np.any(rate > max_rate):
        raise EventBudgetExceeded(f"Poisson mean {rate.max():.3g} exceeds {max_rate:.3g}")
    return g.poisson(rate)


def sample_multi_sfnb(params, t, size, rng, max_rate=1e15):
    """``size`` draws of the d-vector at time ``t``; shape ``(size, d)``."""
    g = _gen(rng)
    clock = _clock_at(params.beta, params.alpha, t, size, g)
    if np.any(clock * max(params.lambdas) > max_rate):
        raise EventBudgetExceeded("Poisson mean exceeds the sampling budget")
    return np.column_stack([g.poisson(lam * clock) for lam in params.lambdas])
