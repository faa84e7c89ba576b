"""Parameter containers and the finite pmf table."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SfnbParams", "DistOrderParams", "PolyaParams", "MultiParams", "PmfTable"]


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True)
class SfnbParams:
    """Univariate SFNB parameters.

    ``beta`` is the stability index in (0, 1], ``alpha`` the gamma rate,
    ``p`` the gamma shape rate (shape ``p*t`` at time ``t``) and ``lam`` the
    Poisson rate.
    """

    beta: float
    alpha: float
    p: float
    lam: float

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        for name in ("alpha", "p", "lam"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        object.__setattr__(self, "beta", float(self.beta))

    def series_ratio(self):
        return self.lam**self.beta / self.alpha

    def to_dict(self):
        return {"beta": self.beta, "alpha": self.alpha, "p": self.p, "lambda": self.lam}


@dataclass(frozen=True)
class DistOrderParams:
    """Distributed-order SFNB: index ``beta1`` w.p. ``a1``, ``beta2`` w.p. ``a2``.

    The weights are rescaled on construction so that ``a1 + a2 == 1``.
    """

    beta1: float
    beta2: float
    a1: float
    a2: float
    alpha: float
    p: float
    lam: float

    def __post_init__(self):
        for name in ("beta1", "beta2"):
            b = float(getattr(self, name))
            if not 0 < b < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {b}")
            object.__setattr__(self, name, b)
        a1, a2 = float(self.a1), float(self.a2)
        if a1 < 0 or a2 < 0 or a1 + a2 <= 0:
            raise ValueError("weights a1, a2 must be nonnegative and not both zero")
        object.__setattr__(self, "a1", a1 / (a1 + a2))
        object.__setattr__(self, "a2", a2 / (a1 + a2))
        for name in ("alpha", "p", "lam"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    def weights(self):
        """``(a1 lam^beta1 / alpha, a2 lam^beta2 / alpha)``."""
        return (
            self.a1 * self.lam**self.beta1 / self.alpha,
            self.a2 * self.lam**self.beta2 / self.alpha,
        )

    def to_dict(self):
        return {
            "beta1": self.beta1,
            "beta2": self.beta2,
            "a1": self.a1,
            "a2": self.a2,
            "alpha": self.alpha,
            "p": self.p,
            "lambda": self.lam,
        }


@dataclass(frozen=True)
class PolyaParams:
    """Space-fractional Polya-type process ``N_beta(u, Y(t)**d)``.

    ``Y`` is a gamma subordinator with scale ``lam`` (density proportional to
    ``y**(pt-1) exp(-y/lam)``); ``u`` is the SFPP time argument.
    """

    u: float
    lam: float
    p: float
    d: float
    beta: float

    def __post_init__(self):
        u = float(self.u)
        if not (u >= 0 and math.isfinite(u)):
            raise ValueError(f"u must be nonnegative, got {u}")
        object.__setattr__(self, "u", u)
        for name in ("lam", "p", "d"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        if not 0 < self.beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        object.__setattr__(self, "beta", float(self.beta))

    def to_dict(self):
        return {"u": self.u, "lambda": self.lam, "p": self.p, "d": self.d, "beta": self.beta}


@dataclass(frozen=True)
class MultiParams:
    """d-dimensional SFNB with a common gamma clock (``p`` fixed to 1)."""

    beta: float
    alpha: float
    lambdas: tuple

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        lams = tuple(_positive("lambda_j", v) for v in np.atleast_1d(self.lambdas))
        if not lams:
            raise ValueError("need at least one rate")
        object.__setattr__(self, "lambdas", lams)

    @property
    def dim(self):
        return len(self.lambdas)

    def s_lambda(self):
        return math.fsum(self.lambdas)

    def series_ratio(self):
        return self.s_lambda() ** self.beta / self.alpha

    def to_dict(self):
        return {"beta": self.beta, "alpha": self.alpha, "lambdas": list(self.lambdas)}


@dataclass
class PmfTable:
    """Probabilities on a finite support.

    ``support`` has shape ``(m,)`` for counts or ``(m, d)`` for count vectors.
    ``truncation_mass`` is whatever probability the table does not list.
    """

    support: np.ndarray
    probs: np.ndarray
    truncation_mass: float = field(default=None)

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        self.probs = np.asarray(self.probs, dtype=float)
        if self.support.shape[0] != self.probs.shape[0]:
            raise ValueError("support and probs differ in length")
        if self.truncation_mass is None:
            self.truncation_mass = 1.0 - math.fsum(self.probs.tolist())
        if np.any(self.probs < 0) or np.any(self.probs > 1 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.truncation_mass < -1e-10:
            raise ValueError(f"probabilities sum above one by {-self.truncation_mass:.3g}")

    @property
    def ndim(self):
        return 1 if self.support.ndim == 1 else self.support.shape[1]

    def keys(self):
        if self.support.ndim == 1:
            return [int(s) for s in self.support]
        return [tuple(int(v) for v in row) for row in self.support]

    def as_dict(self):
        return dict(zip(self.keys(), self.probs.tolist()))

    def __len__(self):
        return len(self.probs)
