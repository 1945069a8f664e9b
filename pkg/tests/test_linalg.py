import numpy as np
import pytest

from tourdiag.linalg import jacobi_eigh, jacobi_svd


@pytest.mark.parametrize("shape", [(1, 1), (2, 2), (3, 2), (6, 2), (5, 5), (12, 3)])
def test_svd_matches_lapack(shape):
    rng = np.random.default_rng(sum(shape))
    M = rng.standard_normal(shape)
    U, s, Vt = jacobi_svd(M)
    np.testing.assert_allclose(U @ np.diag(s) @ Vt, M, atol=1e-12)
    np.testing.assert_allclose(s, np.linalg.svd(M, compute_uv=False), atol=1e-12)
    np.testing.assert_allclose(U.T @ U, np.eye(shape[1]), atol=1e-12)
    np.testing.assert_allclose(Vt @ Vt.T, np.eye(shape[1]), atol=1e-12)


def test_svd_wide_matrix():
    M = np.random.default_rng(3).standard_normal((2, 5))
    U, s, Vt = jacobi_svd(M)
    np.testing.assert_allclose(U @ np.diag(s) @ Vt, M, atol=1e-12)


def test_svd_rank_deficient_completes_u():
    M = np.array([[1.0, 0.0], [0.0, 0.0]])
    U, s, Vt = jacobi_svd(M)
    np.testing.assert_allclose(s, [1.0, 0.0])
    np.testing.assert_allclose(U.T @ U, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(U @ np.diag(s) @ Vt, M, atol=1e-14)


def test_svd_zero_matrix():
    U, s, Vt = jacobi_svd(np.zeros((2, 2)))
    np.testing.assert_array_equal(s, [0.0, 0.0])
    np.testing.assert_allclose(U.T @ U, np.eye(2))


@pytest.mark.parametrize("n", [1, 2, 4, 10, 20])
def test_eigh_matches_lapack(n):
    rng = np.random.default_rng(n)
    B = rng.standard_normal((n, n))
    S = B @ B.T
    w, V = jacobi_eigh(S)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(S)[::-1], rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, S, atol=1e-9)
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-12)


def test_eigh_sign_convention():
    S = np.diag([3.0, 1.0, 2.0])
    w, V = jacobi_eigh(S)
    np.testing.assert_array_equal(w, [3.0, 2.0, 1.0])
    idx = np.argmax(np.abs(V), axis=0)
    assert np.all(V[idx, np.arange(3)] > 0)


def test_eigh_rejects_asymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
