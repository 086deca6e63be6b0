"""Exhaustive check of the local-realistic range of the Bell quantity.

A deterministic strategy fixes the outcome of each of the four local
settings.  Every local-hidden-variable model is a mixture of these, and
the Bell quantity is linear in the probabilities, so its local range is
spanned by the ``d**4`` deterministic values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EnumerationCapError, check_dimension
from .functional import JointDistribution, LEADING_SIGNS, OTHER_SIGNS, bell_from_distributions, bell_weights
from .geometry import build_outcome_vectors

ENUMERATION_CAP = 12


class DeterministicStrategy(NamedTuple):
    a1: int
    a2: int
    b1: int
    b2: int

    def check(self, d: int) -> None:
        for name, v in zip(self._fields, self):
            if not 0 <= v < d:
                raise ValueError(f"outcome {name}={v} outside 0..{d - 1}")


@dataclass
class LhvExtrema:
    d: int
    min: float
    max: float
    argmin: list[DeterministicStrategy]
    argmax: list[DeterministicStrategy]


def strategy_bell_value(s: DeterministicStrategy, d: int) -> float:
    """Bell total of one deterministic strategy via point-mass tables."""
    d = check_dimension(d)
    s = DeterministicStrategy(*s)
    s.check(d)
    tables = [JointDistribution.point_mass(d, a, b) for a in (s.a1, s.a2) for b in (s.b1, s.b2)]
    return bell_from_distributions(*tables).total


def all_strategy_values(d: int) -> np.ndarray:
    """Values of all strategies, indexed ``[a1, a2, b1, b2]``.

    Each correlation of a deterministic strategy is a single simplex vector,
    so the value is assembled from vector components and weights directly.
    """
    V = build_outcome_vectors(d).vectors
    w = bell_weights(d)
    idx = np.arange(d)
    total = np.zeros((d,) * 4)
    for i, j in itertools.product(range(2), range(2)):
        signs = np.full(d - 1, OTHER_SIGNS[i, j])
        signs[0] = LEADING_SIGNS[i, j]
        Q = V[(idx[:, None] + idx[None, :]) % d]  # Q[a, b] = v_{a+b}
        contrib = Q @ (w * signs)
        shape = [1, 1, 1, 1]
        shape[i], shape[2 + j] = d, d
        total += contrib.reshape(shape)
    return total


def enumerate_lhv_extrema(d: int, cap: int = ENUMERATION_CAP, tol: float = 1e-12) -> LhvExtrema:
    d = check_dimension(d)
    if d > cap:
        raise EnumerationCapError(
            f"d={d} needs {d**4} strategies; raise the enumeration cap to at least {d}")
    vals = all_strategy_values(d)
    lo, hi = float(vals.min()), float(vals.max())

    def where(target):
        return [DeterministicStrategy(*map(int, ix)) for ix in np.argwhere(np.abs(vals - target) <= tol)]

    return LhvExtrema(d, lo, hi, where(lo), where(hi))


def random_lhv_value(d: int, rng: np.random.Generator, n_strategies: int = 8) -> float:
    """Bell total of a random mixture of deterministic strategies."""
    weights = rng.dirichlet(np.ones(n_strategies))
    tables = [np.zeros((d, d)) for _ in range(4)]
    for w in weights:
        a1, a2, b1, b2 = rng.integers(0, d, 4)
        for k, (a, b) in enumerate((a, b) for a in (a1, a2) for b in (b1, b2)):
            tables[k][a, b] += w
    return bell_from_distributions(*(JointDistribution(d, t) for t in tables)).total
