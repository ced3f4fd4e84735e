import math

import numpy as np
import pytest

from polyneck.errors import InvalidParameter
from polyneck.jacobi import jacobi_eigenvalues, smallest_eigenvalue


def test_two_by_two_closed_form():
    s = math.sqrt(3) / 2
    assert smallest_eigenvalue([[1, s], [s, 1]]) == pytest.approx(1 - s, rel=1e-14)


@pytest.mark.parametrize("k", [1, 3, 7])
def test_identity(k):
    assert np.allclose(jacobi_eigenvalues(np.eye(k)), 1.0, rtol=0, atol=1e-15)


def test_diagonal():
    assert smallest_eigenvalue(np.diag([2.0, 5.0])) == 2.0


def test_asymmetric_rejected():
    with pytest.raises(InvalidParameter):
        jacobi_eigenvalues([[1.0, 2.0], [0.0, 1.0]])


def test_non_square_rejected():
    with pytest.raises(InvalidParameter):
        jacobi_eigenvalues(np.zeros((2, 3)))


@pytest.mark.parametrize("k", [2, 4, 6, 10])
def test_against_lapack(k):
    rng = np.random.default_rng(k)
    for _ in range(50):
        A = rng.standard_normal((k, k))
        S = A + A.T
        want = np.linalg.eigvalsh(S)
        got = jacobi_eigenvalues(S)
        assert np.allclose(got, want, rtol=0, atol=1e-12 * np.abs(want).max())


def test_batched_matches_single():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((5, 4, 4))
    S = A + np.swapaxes(A, 1, 2)
    batch = jacobi_eigenvalues(S)
    for i in range(5):
        assert np.allclose(batch[i], jacobi_eigenvalues(S[i]), atol=1e-13)


def test_graded_matrix_small_eigenvalue():
    # Hilbert matrix: tiny smallest eigenvalue, known to high relative accuracy
    k = 6
    H = np.array([[1.0 / (i + j + 1) for j in range(k)] for i in range(k)])
    assert smallest_eigenvalue(H) == pytest.approx(1.0827994845e-7, rel=1e-6)
