import math

import numpy as np
import pytest

from bellscope.errors import DimensionMismatchError, ParameterCountError
from bellscope.functional import JointDistribution, bell_from_distributions
from bellscope.quantum import (MeasurementUnitary, SchmidtDiagonalState, UnitaryParams, cglmp_settings,
                               decompose_unitary, epr_state, fourier_matrix, joint_probabilities,
                               nopa_coefficients, nopa_coefficients_derivative, nopa_truncated_state,
                               param_count, parametrize_unitary, same_measurement,
                               sector_grouped_probabilities, unitarity_residual)

from conftest import haar_unitary


def kron_oracle(lam, A, B):
    """Joint table from the full two-party state vector."""
    d = lam.size
    psi = np.zeros(d * d, dtype=complex)
    for j in range(d):
        psi[j * d + j] = lam[j]
    out = np.kron(A, B) @ psi
    return np.abs(out.reshape(d, d)) ** 2


def test_nopa_coefficients_formula():
    d, r = 3, 1.4068
    t = math.tanh(r)
    pref = (1 / math.cosh(r)) / math.sqrt(1 - t ** (2 * d))
    np.testing.assert_allclose(nopa_coefficients(d, r), pref * t ** np.arange(d), atol=1e-15)


def test_nopa_limits():
    np.testing.assert_array_equal(nopa_coefficients(4, 0.0), [1, 0, 0, 0])
    np.testing.assert_allclose(nopa_coefficients(4, math.inf), [0.5] * 4)
    with pytest.raises(ValueError):
        nopa_coefficients(3, -0.1)


@pytest.mark.parametrize("r", [0.2, 1.0, 2.5])
def test_nopa_state_invariants(r):
    lam = nopa_truncated_state(6, r).coeffs
    assert abs(lam @ lam - 1) < 1e-12
    assert np.all(np.diff(lam) <= 0)


def test_nopa_derivative_matches_finite_difference():
    for d, r in [(3, 0.7), (6, 1.6)]:
        h = 1e-6
        fd = (nopa_coefficients(d, r + h) - nopa_coefficients(d, r - h)) / (2 * h)
        np.testing.assert_allclose(nopa_coefficients_derivative(d, r), fd, atol=1e-8)


def test_state_validation():
    with pytest.raises(ValueError):
        SchmidtDiagonalState(2, np.array([1.0, 1.0]))
    with pytest.raises(DimensionMismatchError):
        SchmidtDiagonalState(3, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        MeasurementUnitary(2, np.array([[1, 1], [0, 1]]))


def test_parametrize_zero_and_counts(rng):
    assert np.allclose(parametrize_unitary(UnitaryParams("full", np.zeros(12)), 4).matrix, np.eye(4))
    F = parametrize_unitary(UnitaryParams("phase-fourier", np.zeros(5)), 5).matrix
    np.testing.assert_allclose(F, fourier_matrix(5))
    assert unitarity_residual(F) < 1e-12
    assert param_count("full", 5) == 20 and param_count("phase-fourier", 5) == 5
    with pytest.raises(ParameterCountError):
        parametrize_unitary(UnitaryParams("full", np.zeros(5)), 3)
    with pytest.raises(ValueError):
        UnitaryParams("cayley", np.zeros(3))


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_random_params_unitary(d, rng):
    for scheme in ("full", "phase-fourier"):
        for _ in range(20):
            x = rng.uniform(0, 2 * np.pi, param_count(scheme, d))
            U = parametrize_unitary(UnitaryParams(scheme, x), d).matrix
            assert unitarity_residual(U) <= 1e-10


@pytest.mark.parametrize("d", [2, 3, 4, 7])
def test_full_scheme_reaches_haar_unitaries(d, rng):
    for _ in range(10):
        U = haar_unitary(d, rng)
        W = parametrize_unitary(decompose_unitary(U), d).matrix
        assert same_measurement(U, W, tol=1e-10)


def test_identity_unitaries_give_diagonal_table():
    st = nopa_truncated_state(4, 0.8)
    p = joint_probabilities(st, np.eye(4), np.eye(4)).p
    np.testing.assert_allclose(p, np.diag(st.coeffs**2), atol=1e-15)


def test_d2_epr_computational_basis():
    p = joint_probabilities(epr_state(2), np.eye(2), np.eye(2)).p
    np.testing.assert_allclose(p, [[0.5, 0], [0, 0.5]], atol=1e-15)


def test_joint_probabilities_match_kron_oracle(rng):
    for d in (2, 3, 5):
        st = nopa_truncated_state(d, rng.uniform(0.1, 2.5))
        A, B = haar_unitary(d, rng), haar_unitary(d, rng)
        np.testing.assert_allclose(joint_probabilities(st, A, B).p, kron_oracle(st.coeffs, A, B), atol=1e-14)


def test_normalization_random_draws(rng):
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 9))
        r = math.inf if rng.random() < 0.1 else rng.uniform(0, 4)
        st = nopa_truncated_state(d, r)
        p = joint_probabilities(st, haar_unitary(d, rng), haar_unitary(d, rng)).p
        worst = max(worst, abs(p.sum() - 1))
        assert p.min() >= 0
    assert worst < 1e-10


def test_global_phase_invariance(rng):
    st = nopa_truncated_state(4, 1.1)
    A, B = haar_unitary(4, rng), haar_unitary(4, rng)
    base = joint_probabilities(st, A, B).p
    for ph in rng.uniform(0, 2 * np.pi, 5):
        np.testing.assert_allclose(joint_probabilities(st, np.exp(1j * ph) * A, B).p, base, atol=1e-14)
        np.testing.assert_allclose(joint_probabilities(st, A, np.exp(1j * ph) * B).p, base, atol=1e-14)


def test_row_phase_invariance(rng):
    st = nopa_truncated_state(3, 0.9)
    A, B = haar_unitary(3, rng), haar_unitary(3, rng)
    D = np.diag(np.exp(1j * rng.uniform(0, 6, 3)))
    np.testing.assert_allclose(joint_probabilities(st, D @ A, B).p, joint_probabilities(st, A, B).p, atol=1e-14)


def test_epr_marginals_uniform(rng):
    for d in (2, 3, 6):
        p = joint_probabilities(epr_state(d), haar_unitary(d, rng), haar_unitary(d, rng)).p
        np.testing.assert_allclose(p.sum(axis=0), 1 / d, atol=1e-10)
        np.testing.assert_allclose(p.sum(axis=1), 1 / d, atol=1e-10)


def test_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatchError):
        joint_probabilities(epr_state(3), np.eye(3), np.eye(4))


def sector_oracle(L, r, d, A, B):
    """Explicit mod-d binning of the block-rotated squeezed state."""
    n = L * d
    c = np.array([math.tanh(r) ** k for k in range(n)])
    c /= np.linalg.norm(c)
    UA = np.zeros((n, n), dtype=complex)
    UB = np.zeros((n, n), dtype=complex)
    for s in range(L):
        UA[s * d:(s + 1) * d, s * d:(s + 1) * d] = A
        UB[s * d:(s + 1) * d, s * d:(s + 1) * d] = B
    psi = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(psi, c)
    full = np.abs(UA @ psi @ UB.T) ** 2
    p = np.zeros((d, d))
    for a in range(n):
        for b in range(n):
            p[a % d, b % d] += full[a, b]
    return p


@pytest.mark.parametrize("d", [3, 5])
@pytest.mark.parametrize("r", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("L", [1, 4, 8])
def test_sector_equivalence(d, r, L, rng):
    A, B = haar_unitary(d, rng), haar_unitary(d, rng)
    got = sector_grouped_probabilities(L, r, d, A, B).p
    np.testing.assert_allclose(got, sector_oracle(L, r, d, A, B), atol=1e-13)
    ref = joint_probabilities(nopa_truncated_state(d, r), A, B).p
    tail = math.tanh(r) ** (2 * d * L) * 10
    assert np.abs(got - ref).max() <= max(tail, 1e-13)


def test_sector_identity_unitaries():
    d, L, r = 3, 4, 0.8
    p = sector_grouped_probabilities(L, r, d, np.eye(d), np.eye(d)).p
    c = math.tanh(r) ** np.arange(L * d)
    c2 = c**2 / np.sum(c**2)
    np.testing.assert_allclose(p, np.diag(c2.reshape(L, d).sum(axis=0)), atol=1e-15)


def test_sector_bad_cutoff():
    for L in (0, -1, 1.5, True):
        with pytest.raises(ValueError):
            sector_grouped_probabilities(L, 1.0, 3, np.eye(3), np.eye(3))
    with pytest.raises(ValueError):
        sector_grouped_probabilities(2, math.inf, 3, np.eye(3), np.eye(3))


def cglmp_bell(d, r=math.inf):
    st = nopa_truncated_state(d, r)
    A1, A2, B1, B2 = cglmp_settings(d)
    tabs = [joint_probabilities(st, a, b) for a in (A1, A2) for b in (B1, B2)]
    return bell_from_distributions(*tabs)


def test_cglmp_settings_known_values():
    assert cglmp_bell(2).total == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert cglmp_bell(3).total == pytest.approx(4 / (6 * math.sqrt(3) - 9), abs=1e-12)
    assert cglmp_bell(5).total == pytest.approx(2.91055, abs=1e-5)


def test_cglmp_uniform_modulus():
    from bellscope.functional import correlation_vector
    for d in (3, 4, 7):
        st = epr_state(d)
        A1, A2, B1, B2 = cglmp_settings(d)
        for a in (A1, A2):
            for b in (B1, B2):
                q = correlation_vector(joint_probabilities(st, a, b)).norm()
                assert q == pytest.approx(math.sqrt((2 * d - 1) / (3 * d)), abs=1e-12)
