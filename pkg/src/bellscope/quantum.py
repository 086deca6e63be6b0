"""Two-mode squeezed states, local measurement unitaries, joint statistics.

States are Schmidt-diagonal, ``sum_n lam_n |n>|n>``.  A measurement is a
unitary ``U`` whose row ``m`` is the bra of outcome ``m``:
``P(a = m) = U^dagger |m><m| U``.  With this convention

    P(a = m, b = n) = |sum_j lam_j U_A[m, j] U_B[n, j]|^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, ParameterCountError, check_dimension
from .functional import JointDistribution

UNITARITY_TOL = 1e-10
SCHEMES = ("full", "phase-fourier")

# Per-setting phase offsets (A1, A2, B1, B2) of the CGLMP-type settings.
CGLMP_OFFSETS = (-0.5, 0.0, 0.75, 0.25)


@dataclass(frozen=True)
class SchmidtDiagonalState:
    d: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.d,):
            raise DimensionMismatchError(f"expected {self.d} coefficients, got {c.shape}")
        if c.min() < 0:
            raise ValueError("Schmidt coefficients must be nonnegative")
        if abs(c @ c - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized: sum lam^2 = {c @ c!r}")
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class MeasurementUnitary:
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.matrix, dtype=complex)
        if U.shape != (self.d, self.d):
            raise DimensionMismatchError(f"expected {self.d}x{self.d} matrix, got {U.shape}")
        resid = unitarity_residual(U)
        if resid > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (residual {resid:.3e})")
        object.__setattr__(self, "matrix", U)


@dataclass(frozen=True)
class UnitaryParams:
    scheme: str
    params: np.ndarray

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        object.__setattr__(self, "params", np.asarray(self.params, dtype=float).ravel())


def unitarity_residual(U: np.ndarray) -> float:
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])))


def param_count(scheme: str, d: int) -> int:
    if scheme == "full":
        return d * (d - 1)
    if scheme == "phase-fourier":
        return d
    raise ValueError(f"unknown scheme {scheme!r}")


def givens_pairs(d: int) -> list[tuple[int, int]]:
    """Level pairs (p, q) in the order the rotations are applied."""
    return [(p, q) for q in range(d - 1, 0, -1) for p in range(q)]


# --- states -----------------------------------------------------------------

def nopa_coefficients(d: int, r: float) -> np.ndarray:
    d = check_dimension(d)
    if r < 0 or math.isnan(r):
        raise ValueError(f"squeezing parameter must be >= 0, got {r!r}")
    if math.isinf(r):
        return np.full(d, 1.0 / math.sqrt(d))
    t = math.tanh(r)
    # sech r / sqrt(1 - tanh^{2d} r) is the normalizer of tanh^n r, n < d
    u = t ** np.arange(d)
    return u / np.linalg.norm(u)


def nopa_coefficients_derivative(d: int, r: float) -> np.ndarray:
    """d lam / d r for finite r."""
    t = math.tanh(r)
    n = np.arange(d)
    u = t**n
    du = np.where(n > 0, n * t ** np.maximum(n - 1, 0), 0.0)
    norm = np.linalg.norm(u)
    lam = u / norm
    dlam_dt = (du - lam * (lam @ du)) / norm
    return dlam_dt * (1.0 - t * t)


def nopa_truncated_state(d: int, r: float) -> SchmidtDiagonalState:
    """Two-mode squeezed vacuum projected on the first d Fock levels.

    ``r = math.inf`` gives the maximally entangled (EPR-limit) state.
    """
    return SchmidtDiagonalState(check_dimension(d), nopa_coefficients(d, r))


def epr_state(d: int) -> SchmidtDiagonalState:
    return nopa_truncated_state(d, math.inf)


# --- measurements -------------------------------------------------------------

def fourier_matrix(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d)


def unitary_matrix(params: UnitaryParams, d: int) -> np.ndarray:
    """Raw matrix for ``params`` without the unitarity check."""
    n = param_count(params.scheme, d)
    x = params.params
    if x.size != n:
        raise ParameterCountError(f"{params.scheme} scheme at d={d} needs {n} parameters, got {x.size}")
    if params.scheme == "full":
        k = n // 2
        return kernels.givens_unitary(np.ascontiguousarray(x[:k]), np.ascontiguousarray(x[k:]), d)
    return fourier_matrix(d) * np.exp(2j * np.pi * x)[None, :]


def parametrize_unitary(params: UnitaryParams, d: int) -> MeasurementUnitary:
    """Build a measurement unitary from scheme parameters.

    ``full``: ``d(d-1)/2`` rotation angles followed by as many phases; the
    product of two-level rotations covers every unitary up to row phases,
    which do not change the measurement.
    ``phase-fourier``: ``F @ diag(exp(2 pi i params))`` with ``F`` the
    discrete Fourier matrix; phases are in turns.
    """
    d = check_dimension(d)
    return MeasurementUnitary(d, unitary_matrix(params, d))


def decompose_unitary(U: np.ndarray) -> UnitaryParams:
    """Full-scheme parameters reproducing ``U`` up to row phases.

    Entries below the diagonal are nulled row by row with column rotations,
    leaving a diagonal of phases that is discarded.
    """
    W = np.array(U, dtype=complex)
    d = W.shape[0]
    pairs = givens_pairs(d)
    theta = np.empty(len(pairs))
    phi = np.empty(len(pairs))
    for idx, (p, q) in enumerate(pairs):
        a, b = W[q, p], W[q, q]
        th = math.atan2(abs(a), abs(b))
        ph = float(np.angle(a) - np.angle(b)) if abs(a) > 0 else 0.0
        c, s, e = math.cos(th), math.sin(th), np.exp(-1j * ph)
        cp, cq = W[:, p].copy(), W[:, q].copy()
        W[:, p] = e * c * cp - s * cq
        W[:, q] = e * s * cp + c * cq
        theta[idx], phi[idx] = th, ph
    return UnitaryParams("full", np.concatenate([theta, np.mod(phi, 2 * np.pi)]))


def same_measurement(U: np.ndarray, W: np.ndarray, tol: float = 1e-10) -> bool:
    """True if U and W differ only by phases on their rows."""
    G = U @ W.conj().T
    return bool(np.allclose(np.abs(np.diag(G)), 1.0, atol=tol)
                and np.allclose(G - np.diag(np.diag(G)), 0.0, atol=tol))


def cglmp_params(d: int) -> tuple[UnitaryParams, ...]:
    """Phase-Fourier parameters of the CGLMP-type settings (A1, A2, B1, B2)."""
    d = check_dimension(d)
    n = np.arange(d)
    return tuple(UnitaryParams("phase-fourier", -o * ((-n) % d) / d) for o in CGLMP_OFFSETS)


def cglmp_settings(d: int) -> tuple[MeasurementUnitary, ...]:
    """Fourier-type settings that are optimal for the EPR-limit state.

    Setting ``s`` uses phases ``-o_s * ((-n) mod d) / d`` turns on label n,
    with offsets ``o = (-1/2, 0, 3/4, 1/4)``.  On the maximally entangled
    state they reach the closed-form EPR value; on the squeezed state they
    give the Fourier-family branch of the finite-r violation.
    """
    return tuple(parametrize_unitary(p, d) for p in cglmp_params(d))


# --- statistics ---------------------------------------------------------------

def _as_matrix(U) -> np.ndarray:
    return U.matrix if isinstance(U, MeasurementUnitary) else np.asarray(U, dtype=complex)


def joint_probabilities(state: SchmidtDiagonalState, U_A, U_B) -> JointDistribution:
    A, B = _as_matrix(U_A), _as_matrix(U_B)
    if A.shape != (state.d, state.d) or B.shape != (state.d, state.d):
        raise DimensionMismatchError("unitaries do not match the state dimension")
    amp = (A * state.coeffs) @ B.T
    p = amp.real**2 + amp.imag**2
    return JointDistribution(state.d, p)


def sector_grouped_probabilities(L: int, r: float, d: int, U_A, U_B) -> JointDistribution:
    """Outcome statistics of the squeezed state on ``L * d`` Fock levels.

    Each block of levels ``{ds, ..., ds + d - 1}`` is rotated by the same
    d x d unitary; Fock outcome ``k`` is reported as ``k mod d``.  The
    truncated state is renormalized before measuring.
    """
    d = check_dimension(d)
    if isinstance(L, bool) or int(L) != L or L < 1:
        raise ValueError(f"cutoff must be a positive number of blocks, got {L!r}")
    if not (0 <= r < math.inf):
        raise ValueError(f"squeezing parameter must be finite and >= 0, got {r!r}")
    A, B = _as_matrix(U_A), _as_matrix(U_B)
    if A.shape != (d, d) or B.shape != (d, d):
        raise DimensionMismatchError("unitaries do not match d")
    L = int(L)
    c = math.tanh(r) ** np.arange(L * d) / math.cosh(r)
    c /= np.linalg.norm(c)
    eye = np.eye(L)
    amp = (np.kron(eye, A) * c) @ np.kron(eye, B).T
    p = (amp.real**2 + amp.imag**2).reshape(L, d, L, d).sum(axis=(0, 2))
    return JointDistribution(d, p)
