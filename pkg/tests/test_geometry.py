import numpy as np
import pytest

from bellscope.errors import InvalidDimensionError
from bellscope.geometry import build_outcome_vectors, outcome_index


@pytest.mark.parametrize("d", range(2, 21))
def test_simplex_invariants(d):
    V = build_outcome_vectors(d).vectors
    assert V.shape == (d, d - 1)
    gram = V @ V.T
    expected = np.full((d, d), -1.0 / (d - 1))
    np.fill_diagonal(expected, 1.0)
    np.testing.assert_allclose(gram, expected, atol=1e-12)
    np.testing.assert_allclose(V.sum(axis=0), 0.0, atol=1e-12)
    build_outcome_vectors(d).check()


@pytest.mark.parametrize("d", range(2, 21))
def test_layout_is_lower_triangular_with_positive_diagonal(d):
    V = build_outcome_vectors(d).vectors
    assert V[0, 0] == 1.0
    for j in range(1, d - 1):
        assert V[j, j] > 0
        assert np.all(V[j, j + 1:] == 0)
        # entries before the diagonal coincide with the last vector's
        np.testing.assert_allclose(V[j, :j], V[-1, :j], atol=1e-15)


def test_d3_layout():
    V = build_outcome_vectors(3).vectors
    s = np.sqrt(3) / 2
    np.testing.assert_allclose(V, [[1, 0], [-0.5, s], [-0.5, -s]], atol=1e-15)


def test_d2_layout():
    np.testing.assert_array_equal(build_outcome_vectors(2).vectors, [[1.0], [-1.0]])


def test_vectors_read_only():
    V = build_outcome_vectors(4).vectors
    with pytest.raises(ValueError):
        V[0, 0] = 2.0


@pytest.mark.parametrize("d", [1, 0, -3, 2.5])
def test_bad_dimension(d):
    with pytest.raises(InvalidDimensionError):
        build_outcome_vectors(d)


def test_outcome_index_wraps():
    assert outcome_index(2, 2, 3) == 1
    assert outcome_index(0, 0, 5) == 0
    assert outcome_index(4, 4, 5) == 3
