"""Closed-form EPR-limit values, their d -> infinity limit, and curve fits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RankDeficientError, check_dimension

N_FIT_TERMS = 4


def closed_form_epr(d: int) -> float:
    """Maximal violation for the maximally entangled state of dimension d.

    ``4d sum_{k < floor(d/2)} (1 - 2k/(d-1)) (1/(2d^3 sin^2(pi(k+1/4)/d))
    - 1/(2d^3 sin^2(pi(k+3/4)/d)))``.
    """
    d = check_dimension(d)
    k = np.arange(d // 2, dtype=float)
    a = np.sin(np.pi * (k + 0.25) / d) ** 2
    b = np.sin(np.pi * (-k - 1 + 0.25) / d) ** 2
    terms = (1 - 2 * k / (d - 1)) * (1 / (2 * d**3 * a) - 1 / (2 * d**3 * b))
    return float(4 * d * np.sum(terms))


def epr_limit_series(terms: int = 100_000) -> float:
    """``(2/pi^2) sum_k g(k)``, ``g(k) = 1/(k+1/4)^2 - 1/(k+3/4)^2``.

    The first ``terms`` summands are added and the rest replaced by
    ``int_K^inf g = 1/(K+1/4) - 1/(K+3/4)``.  Since g is positive, decreasing
    and convex, each omitted summand exceeds its slice of the integral, so
    the estimate increases with ``terms``, stays below the limit, and is
    short of it by less than ``g(K)/pi^2 < 1/(pi^2 K^3)`` (1e-13 at K = 1e4).
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    k = np.arange(terms, dtype=float)
    head = float(np.sum(1 / (k + 0.25) ** 2 - 1 / (k + 0.75) ** 2))
    K = float(terms)
    tail = 1 / (K + 0.25) - 1 / (K + 0.75)
    return 2 / math.pi**2 * (head + tail)


def optimal_modulus(d: int) -> float:
    """Common length of the four optimal correlation vectors at r -> infinity."""
    d = check_dimension(d)
    return math.sqrt((2 * d - 1) / (3 * d))


@dataclass(frozen=True)
class FitModel:
    """``B(d) = a + b/d + c/d**2 + e*exp(-d)``."""

    a: float
    b: float
    c: float
    e: float
    residual_norm: float

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        return self.a + self.b / d + self.c / d**2 + self.e * np.exp(-d)

    @property
    def asymptote(self) -> float:
        return self.a


def _design(d: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones_like(d), 1 / d, 1 / d**2, np.exp(-d)])


def fit_asymptote(points) -> FitModel:
    """Linear least-squares fit of ``FitModel`` to ``(d, B)`` pairs."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    d, y = pts[:, 0], pts[:, 1]
    if np.unique(d).size < N_FIT_TERMS:
        raise RankDeficientError(f"need at least {N_FIT_TERMS} distinct d values, got {np.unique(d).size}")
    X = _design(d)
    # columns differ by orders of magnitude; scale before the SVD solve
    scale = np.linalg.norm(X, axis=0)
    coef, _, rank, _ = np.linalg.lstsq(X / scale, y, rcond=None)
    if rank < N_FIT_TERMS:
        raise RankDeficientError(f"design matrix has rank {rank} < {N_FIT_TERMS}")
    coef = coef / scale
    resid = float(np.linalg.norm(X @ coef - y))
    return FitModel(*map(float, coef), residual_norm=resid)
