"""Vector-valued correlation functions and the weighted Bell quantity."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatchError, check_dimension
from .geometry import OutcomeVectorSet, build_outcome_vectors

NEG_TOL = 1e-12
SUM_TOL = 1e-10

# Sign of Q_11, Q_12, Q_21, Q_22 in the leading component and in all others.
LEADING_SIGNS = np.array([[1.0, 1.0], [-1.0, 1.0]])
OTHER_SIGNS = np.array([[1.0, -1.0], [-1.0, 1.0]])


@dataclass(frozen=True)
class JointDistribution:
    """Table ``p[m, n] = P(a = m, b = n)`` for one pair of settings."""

    d: int
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (self.d, self.d):
            raise DimensionMismatchError(f"expected {self.d}x{self.d} table, got {p.shape}")
        if p.min() < -NEG_TOL:
            raise ValueError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum():.15g}")
        object.__setattr__(self, "p", np.clip(p, 0.0, None))

    @classmethod
    def point_mass(cls, d: int, m: int, n: int) -> "JointDistribution":
        p = np.zeros((d, d))
        p[m, n] = 1.0
        return cls(d, p)

    @classmethod
    def uniform(cls, d: int) -> "JointDistribution":
        return cls(d, np.full((d, d), 1.0 / d**2))

    def sum_distribution(self) -> np.ndarray:
        """``P(m + n = t mod d)`` for t = 0..d-1."""
        d = self.d
        m = np.arange(d)
        t = (m[:, None] + m[None, :]) % d
        return np.bincount(t.ravel(), weights=self.p.ravel(), minlength=d)


@dataclass(frozen=True)
class CorrelationVector:
    d: int
    q: np.ndarray  # length d - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.q))

    def as_complex(self) -> complex:
        """Two-component vector as ``Q^(0) + i Q^(1)`` (d = 3 only)."""
        if self.d != 3:
            raise DimensionMismatchError("complex encoding is defined for d = 3")
        return complex(self.q[0], self.q[1])


@dataclass(frozen=True)
class BellBreakdown:
    d: int
    components: np.ndarray
    weights: np.ndarray
    total: float


class LhvBounds(NamedTuple):
    lower: float
    upper: float


def correlation_vector(P: JointDistribution, V: OutcomeVectorSet | None = None) -> CorrelationVector:
    """Average of ``v_{(m+n) mod d}`` under ``P``."""
    if V is None:
        V = build_outcome_vectors(P.d)
    if P.d != V.d:
        raise DimensionMismatchError(f"distribution has d={P.d}, vectors have d={V.d}")
    return CorrelationVector(P.d, P.sum_distribution() @ V.vectors)


def bell_weights(d: int) -> np.ndarray:
    d = check_dimension(d)
    N = d - 1
    k = np.arange(N)
    w = np.sqrt((N + 1.0 - k) * (N - k) / ((N + 1.0) * N))
    w[0] = 1.0
    return w


def bell_quantity(Q11: CorrelationVector, Q12: CorrelationVector,
                  Q21: CorrelationVector, Q22: CorrelationVector) -> BellBreakdown:
    d = Q11.d
    if any(Q.d != d for Q in (Q12, Q21, Q22)):
        raise DimensionMismatchError("correlation vectors have different d")
    q11, q12, q21, q22 = (np.asarray(Q.q, dtype=float) for Q in (Q11, Q12, Q21, Q22))
    comps = q11 - q12 - q21 + q22
    comps[0] = q11[0] + q12[0] - q21[0] + q22[0]
    w = bell_weights(d)
    return BellBreakdown(d, comps, w, float(w @ comps))


def bell_from_distributions(P11, P12, P21, P22, V: OutcomeVectorSet | None = None) -> BellBreakdown:
    if V is None:
        V = build_outcome_vectors(P11.d)
    return bell_quantity(*(correlation_vector(P, V) for P in (P11, P12, P21, P22)))


def lhv_bounds(d: int) -> LhvBounds:
    d = check_dimension(d)
    if d == 2:
        return LhvBounds(-2.0, 2.0)
    return LhvBounds(-2.0 * (d + 1) / (d - 1), 2.0)


def complex_form_bell_d3(Q11: complex, Q12: complex, Q21: complex, Q22: complex) -> float:
    """d = 3 Bell value from complex correlations ``sum_t omega^t P(t)``."""
    return float((Q11 + Q12 - Q21 + Q22).real + (Q11 - Q12 - Q21 + Q22).imag / np.sqrt(3.0))


def complex_correlation_d3(P: JointDistribution) -> complex:
    omega = np.exp(2j * np.pi / 3)
    return complex(P.sum_distribution() @ omega ** np.arange(3))


def setting_coefficients(d: int) -> np.ndarray:
    """Collapse the functional onto outcome labels.

    Returns ``c`` of shape (2, 2, d) such that the Bell total equals
    ``sum_{i,j,t} c[i, j, t] * P_ij(m + n = t mod d)``.
    """
    d = check_dimension(d)
    V = build_outcome_vectors(d).vectors
    w = bell_weights(d)
    c = np.empty((2, 2, d))
    for i in range(2):
        for j in range(2):
            signs = np.full(d - 1, OTHER_SIGNS[i, j])
            signs[0] = LEADING_SIGNS[i, j]
            c[i, j] = V @ (w * signs)
    return c


def coefficient_tables(d: int) -> np.ndarray:
    """``K[i, j, m, n] = c[i, j, (m + n) mod d]``; shape (2, 2, d, d)."""
    c = setting_coefficients(d)
    m = np.arange(d)
    t = (m[:, None] + m[None, :]) % d
    return np.ascontiguousarray(c[:, :, t])
