"""Regular-simplex outcome vectors and outcome-label arithmetic.

Outcome ``t`` of a d-outcome correlation is encoded as a unit vector
``v_t`` in ``d - 1`` real dimensions.  The d vectors form a regular
simplex centred at the origin, so any two distinct vectors have inner
product ``-1/(d-1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import check_dimension

TOL = 1e-12


@dataclass(frozen=True)
class OutcomeVectorSet:
    d: int
    vectors: np.ndarray  # shape (d, d - 1), row t is v_t

    @property
    def N(self) -> int:
        return self.d - 1

    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.T

    def check(self, tol: float = TOL) -> None:
        """Raise AssertionError if any simplex invariant is violated."""
        V = self.vectors
        d, N = self.d, self.N
        assert V.shape == (d, N)
        assert np.allclose(np.linalg.norm(V, axis=1), 1.0, rtol=0, atol=tol)
        assert np.allclose(V.sum(axis=0), 0.0, rtol=0, atol=tol)
        expected = (d / N) * np.eye(d) - 1.0 / N
        assert np.allclose(self.gram(), expected, rtol=0, atol=tol)


def build_outcome_vectors(d: int) -> OutcomeVectorSet:
    """Build the d simplex vectors row by row from the closed-form layout.

    ``v_0`` is the first unit axis; ``v_j`` (1 <= j < N) has ``-1/N``-scaled
    entries before position j, a positive entry at j and zeros after;
    ``v_N`` repeats the negative pattern in every position.
    """
    d = check_dimension(d)
    N = d - 1
    V = np.zeros((d, N))
    V[0, 0] = 1.0
    # scale[i] = sqrt((N+1)N / ((N-i+1)(N-i)))
    i = np.arange(N)
    scale = np.sqrt((N + 1) * N / ((N - i + 1.0) * (N - i)))
    for j in range(1, d):
        V[j, :j] = -scale[:j] / N
        if j < N:
            V[j, j] = (N - j) / N * scale[j]
    vs = OutcomeVectorSet(d, V)
    vs.vectors.setflags(write=False)
    return vs


def outcome_index(m: int, n: int, d: int) -> int:
    """Label of the correlation vector for outcomes (m, n): ``(m + n) mod d``."""
    return (m + n) % d
