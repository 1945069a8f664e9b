"""Jacobi-rotation SVD and symmetric eigendecomposition for small dense matrices.

Every matrix handled in this package is tiny (a d x d alignment matrix with
d <= 2, or a covariance of flattened bases with at most a few dozen rows), so
plain cyclic Jacobi sweeps are fast enough and give reproducible signs.
"""

import numpy as np

_MAX_SWEEPS = 100


def jacobi_eigh(S, tol=1e-12):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with eigenvalues in descending order and eigenvectors as
    the columns of ``V``. Each eigenvector is signed so that its
    largest-magnitude entry is positive.
    """
    A = np.array(S, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, atol=1e-10 * max(1.0, np.abs(A).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)

    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    # theta^2 would overflow; the small-angle limit is exact here
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J on rows/cols p, q
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                Vp = V[:, p].copy()
                Vq = V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    else:
        raise RuntimeError("Jacobi eigendecomposition did not converge")

    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    return w, _fix_signs(V)


def _fix_signs(V):
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def jacobi_svd(M, tol=1e-12):
    """Thin SVD ``M = U @ diag(s) @ Vt`` via one-sided Jacobi on the columns.

    Works for any ``m x n`` matrix with ``m >= n``. Singular values come back in
    descending order; left singular vectors for zero singular values are
    completed to an orthonormal set.
    """
    W = np.array(M, dtype=float, copy=True)
    if W.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {W.shape}")
    m, n = W.shape
    if m < n:
        U, s, Vt = jacobi_svd(W.T, tol=tol)
        return Vt.T, s, U.T
    V = np.eye(n)

    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = W[:, p] @ W[:, p]
                beta = W[:, q] @ W[:, q]
                gamma = W[:, p] @ W[:, q]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                if zeta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                Wp = W[:, p].copy()
                W[:, p] = c * Wp - s * W[:, q]
                W[:, q] = s * Wp + c * W[:, q]
                Vp = V[:, p].copy()
                V[:, p] = c * Vp - s * V[:, q]
                V[:, q] = s * Vp + c * V[:, q]
        if not rotated:
            break
    else:
        raise RuntimeError("one-sided Jacobi SVD did not converge")

    s = np.linalg.norm(W, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    W = W[:, order]
    V = V[:, order]

    U = np.zeros((m, n))
    cutoff = max(s[0], 1.0) * 1e-14 if n else 0.0
    for k in range(n):
        if s[k] > cutoff:
            U[:, k] = W[:, k] / s[k]
        else:
            s[k] = 0.0
            U[:, k] = _complete_column(U[:, :k])
    return U, s, V.T


def _complete_column(Q):
    """A unit vector orthogonal to the (orthonormal) columns of ``Q``."""
    m = Q.shape[0]
    best, best_norm = None, -1.0
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        r = e - Q @ (Q.T @ e)
        r = r - Q @ (Q.T @ r)
        nr = np.linalg.norm(r)
        if nr > best_norm:
            best, best_norm = r, nr
    return best / best_norm
