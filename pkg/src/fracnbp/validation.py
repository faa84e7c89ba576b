"""Goodness-of-fit checks of simulated samples against analytic pmfs."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .errors import EmptySample, InsufficientSupport
from .params import PmfTable
from .simulation import sample_stable_unit

__all__ = [
    "GofReport",
    "empirical_pmf",
    "tv_distance",
    "chi_square_stat",
    "gof_report",
    "mc_laplace_check",
    "DEFAULT_TV_THRESHOLD",
    "CHI2_LEVEL",
]

DEFAULT_TV_THRESHOLD = 0.02
CHI2_LEVEL = 0.99


@dataclass
class GofReport:
    """Outcome of one comparison.

    ``criterion`` says which number ``pass_`` was judged on: ``"chi2"``
    (``statistic`` below ``threshold``, the chi-square quantile) or ``"tv"``
    (``tv_distance`` below ``threshold``).
    """

    statistic: float | None
    dof: int | None
    tv_distance: float
    n_samples: int
    pass_: bool
    threshold: float
    criterion: str = "chi2"
    params: dict = field(default_factory=dict)
    seed: int | None = None
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.tv_distance <= 1.0:
            raise ValueError("tv_distance must lie in [0, 1]")
        if self.dof is not None and self.dof < 1:
            raise ValueError("dof must be at least 1")

    def to_dict(self):
        d = asdict(self)
        d["pass"] = bool(d.pop("pass_"))
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _rows(samples):
    a = np.asarray(samples)
    if a.size == 0:
        raise EmptySample("no samples")
    if a.ndim > 2 or np.any(a < 0) or np.any(a != np.round(a)):
        raise ValueError("samples must be nonnegative integers or integer vectors")
    return a.astype(np.int64)


def empirical_pmf(samples):
    """Relative frequencies over the observed support (sorted)."""
    a = _rows(samples)
    if a.ndim == 1:
        support, counts = np.unique(a, return_counts=True)
    else:
        support, counts = np.unique(a, axis=0, return_counts=True)
    return PmfTable(support, counts / a.shape[0], truncation_mass=0.0)


def tv_distance(p, q):
    """Half the L1 distance over the union support.

    Each table's ``truncation_mass`` counts as discrepancy in full, so
    unlisted analytic mass can only increase the distance.
    """
    a, b = p.as_dict(), q.as_dict()
    diffs = [abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b)]
    diffs += [max(p.truncation_mass, 0.0), max(q.truncation_mass, 0.0)]
    return min(1.0, 0.5 * math.fsum(diffs))


def _pooled_cells(observed, expected, min_cell):
    """Merge neighbouring cells left to right until each expects ``>= min_cell``."""
    obs_cells, exp_cells = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= min_cell:
            obs_cells.append(o_acc)
            exp_cells.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if exp_cells:
            obs_cells[-1] += o_acc
            exp_cells[-1] += e_acc
        else:
            obs_cells.append(o_acc)
            exp_cells.append(e_acc)
    return np.array(obs_cells), np.array(exp_cells)


def chi_square_stat(samples, expected, min_cell=5, level=CHI2_LEVEL):
    """Pearson chi-square of ``samples`` against the pmf table ``expected``.

    Cells follow the table's support order; samples outside it and the
    table's truncation mass form a final tail cell. Passes when the
    statistic is below the ``level`` quantile of chi-square(cells - 1).
    """
    a = _rows(samples)
    n = a.shape[0]
    keys = expected.keys()
    index = {k: i for i, k in enumerate(keys)}
    obs = np.zeros(len(keys) + 1)
    rows = a.tolist()
    for r in rows:
        k = tuple(r) if a.ndim == 2 else r
        obs[index.get(k, len(keys))] += 1
    exp = n * np.append(expected.probs, max(expected.truncation_mass, 0.0))
    o, e = _pooled_cells(obs, exp, min_cell)
    if len(e) < 2 or np.any(e < min_cell):
        raise InsufficientSupport(
            f"pooling to expected counts >= {min_cell} leaves {int(np.sum(e >= min_cell))} cell(s); need 2"
        )
    stat = float(np.sum((o - e) ** 2 / e))
    dof = len(e) - 1
    q = float(stats.chi2.ppf(level, dof))
    tv = tv_distance(empirical_pmf(a), expected)
    return GofReport(stat, dof, tv, n, stat < q, q, criterion="chi2")


def gof_report(samples, expected, tv_threshold=DEFAULT_TV_THRESHOLD, min_cell=5, params=None, seed=None):
    """TV-judged report that also carries the chi-square statistic when defined.

    A rough Monte Carlo noise floor for the TV estimate is
    ``0.5 * sum(sqrt(p_k / n))``; when that exceeds the threshold the report
    warns that the test has low power.
    """
    a = _rows(samples)
    n = a.shape[0]
    tv = tv_distance(empirical_pmf(a), expected)
    notes = []
    try:
        chi = chi_square_stat(a, expected, min_cell)
        stat, dof = chi.statistic, chi.dof
    except InsufficientSupport as exc:
        stat = dof = None
        notes.append(str(exc))
    floor = 0.5 * float(np.sum(np.sqrt(expected.probs / n)))
    if floor > tv_threshold:
        notes.append(f"low power: TV noise floor {floor:.3g} exceeds threshold {tv_threshold:g} at n={n}")
    return GofReport(
        stat, dof, tv, n, tv < tv_threshold, tv_threshold,
        criterion="tv", params=dict(params or {}), seed=seed, warnings=notes,
    )


def mc_laplace_check(beta, s_values, n_draws, rng):
    """max over s of |mean(exp(-s D)) - exp(-s^beta)| for Kanter draws D."""
    s = np.asarray(s_values, dtype=float)
    if np.any(s <= 0):
        raise ValueError("s values must be positive")
    d = sample_stable_unit(beta, rng, size=int(n_draws))
    mc = np.array([np.mean(np.exp(-si * d)) for si in s])
    return float(np.max(np.abs(mc - np.exp(-(s**beta)))))
