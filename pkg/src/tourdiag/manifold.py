"""Geometry of projection bases: p x d matrices with orthonormal columns.

Bases are plain ``numpy`` arrays of shape ``(p, d)``. Functions here never
mutate their inputs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import jacobi_svd

ORTHO_TOL = 1e-8
RANK_TOL = 1e-12
DEFAULT_STEP_ANGLE = 0.05


class DegenerateBasisError(ValueError):
    """Raised when a matrix cannot be orthonormalized (numerical rank < d)."""


def as_basis(A):
    """Coerce ``A`` to a 2-D float array; 1-D input becomes a single column."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"basis must be 2-D, got shape {A.shape}")
    return A


def orthonormality_error(A):
    """Largest absolute entry of ``A.T @ A - I``."""
    A = as_basis(A)
    return float(np.max(np.abs(A.T @ A - np.eye(A.shape[1]))))


def is_basis(A, tol=ORTHO_TOL):
    A = as_basis(A)
    p, d = A.shape
    return 1 <= d < p and bool(np.all(np.isfinite(A))) and orthonormality_error(A) <= tol


def check_basis(A, tol=ORTHO_TOL):
    """Validate and return ``A`` as a basis array, raising ``ValueError`` otherwise."""
    A = as_basis(A)
    p, d = A.shape
    if not 1 <= d < p:
        raise ValueError(f"basis shape must satisfy 1 <= d < p, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("basis has non-finite entries")
    err = orthonormality_error(A)
    if err > tol:
        raise ValueError(f"basis columns are not orthonormal (max |A'A - I| = {err:.3g})")
    return A


def _check_pair(A, B):
    A, B = as_basis(A), as_basis(B)
    if A.shape != B.shape:
        raise ValueError(f"basis shapes differ: {A.shape} vs {B.shape}")
    return A, B


def orthonormalize(M):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Column order is preserved, so the first output column is the first input
    column normalized.
    """
    Q = as_basis(M).copy()
    if not np.all(np.isfinite(Q)):
        raise DegenerateBasisError("matrix has non-finite entries")
    d = Q.shape[1]
    for k in range(d):
        v = Q[:, k]
        scale = np.linalg.norm(v)
        for _ in range(2):
            for i in range(k):
                v -= (Q[:, i] @ v) * Q[:, i]
        norm = np.linalg.norm(v)
        if scale == 0.0 or norm < RANK_TOL * max(scale, 1.0):
            raise DegenerateBasisError(
                f"column {k} is linearly dependent on earlier columns (residual {norm:.3g})"
            )
        Q[:, k] = v / norm
    return Q


def principal_angles(A, B):
    """Principal angles between span(A) and span(B), ascending."""
    A, B = _check_pair(A, B)
    U, _, Vt = jacobi_svd(A.T @ B)
    return _chord_angles(A @ U, B @ Vt.T)


def _chord_angles(Ga, Gz):
    # angle between unit columns from their chord length; exact near zero, unlike arccos
    chord = np.linalg.norm(Gz - Ga, axis=0)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def geodesic_distance(A, B):
    """Root-sum-square of the principal angles between the two spans."""
    theta = principal_angles(A, B)
    return float(np.sqrt(np.sum(theta**2)))


def alignment_det(current, target):
    current, target = _check_pair(current, target)
    return float(np.linalg.det(current.T @ target))


def orient_match(current, target):
    """Flip the first column of ``target`` if ``det(current' target) < 0``."""
    current, target = _check_pair(current, target)
    if np.linalg.det(current.T @ target) < 0:
        target = target.copy()
        target[:, 0] = -target[:, 0]
    return target


def random_basis(p, d, rng):
    """Haar-distributed basis: orthonormalized i.i.d. standard normal entries."""
    if not 1 <= d < p:
        raise ValueError(f"need 1 <= d < p, got p={p}, d={d}")
    while True:
        try:
            return orthonormalize(rng.standard_normal((p, d)))
        except DegenerateBasisError:
            continue


def linear_blend(current, random, alpha):
    """Orthonormalized ``(1 - alpha) * current + alpha * random``.

    Raises ``DegenerateBasisError`` when the blend loses rank; callers draw a
    fresh random basis and try again.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    current, random = _check_pair(current, random)
    return orthonormalize((1.0 - alpha) * current + alpha * random)


def _rotation_power(R, t):
    """``R ** t`` for a proper rotation ``R`` (d x d)."""
    d = R.shape[0]
    if d == 1:
        return np.ones((1, 1))
    if d == 2:
        phi = math.atan2(R[1, 0], R[0, 0]) * t
        c, s = math.cos(phi), math.sin(phi)
        return np.array([[c, -s], [s, c]])
    from scipy.linalg import expm, logm

    L = np.real(logm(R))
    L = 0.5 * (L - L.T)
    return expm(t * L)


class _Geodesic:
    """Constant-speed path from ``A`` that ends exactly at ``B``.

    The principal frames ``A U`` and ``B V`` (from the SVD of ``A'B``) are
    rotated into each other one principal angle at a time, while the d x d
    factor sweeps from ``U'`` to ``V'`` so the last frame is ``B`` itself and
    not just a basis of the same span. When ``det(A'B) < 0`` no such path can
    stay on the short side, so the smallest singular pair is reversed and that
    angle becomes ``pi - theta``.
    """

    def __init__(self, A, B):
        A, B = _check_pair(A, B)
        self.A, self.B = A, B
        p, d = A.shape
        U, s, Vt = jacobi_svd(A.T @ B)
        V = Vt.T.copy()
        s = np.clip(s, -1.0, 1.0)
        if np.linalg.det(U) * np.linalg.det(V) < 0:
            V[:, -1] = -V[:, -1]
            s[-1] = -s[-1]
        Ga = A @ U
        Gz = B @ V
        self.theta = _chord_angles(Ga, Gz)
        self.length = float(np.sqrt(np.sum(self.theta**2)))
        H = np.zeros((p, d))
        for i in range(d):
            h = Gz[:, i] - s[i] * Ga[:, i]
            nh = np.linalg.norm(h)
            if nh > 1e-12:
                H[:, i] = h / nh
            elif s[i] < 0:
                # antipodal column pair: any direction orthogonal to both frames works
                H[:, i] = _orth_complement_vector(np.column_stack([Ga, Gz, H[:, :i]]))
        self.Ga, self.H, self.U = Ga, H, U
        self.R = U @ V.T

    def at(self, t):
        c = np.cos(t * self.theta)
        s = np.sin(t * self.theta)
        G = self.Ga * c + self.H * s
        return G @ self.U.T @ _rotation_power(self.R, t)


def _span_basis(M):
    cols = []
    for v in M.T:
        w = v.astype(float).copy()
        for q in cols:
            w -= (q @ w) * q
        nw = np.linalg.norm(w)
        if nw > 1e-9:
            cols.append(w / nw)
    return np.column_stack(cols) if cols else np.zeros((M.shape[0], 0))


def _orth_complement_vector(M):
    Q = _span_basis(M)
    m = Q.shape[0]
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        r = e - Q @ (Q.T @ e)
        nr = np.linalg.norm(r)
        if nr > 1e-6:
            return r / nr
    raise DegenerateBasisError("no orthogonal direction available")


@dataclass(frozen=True)
class GeodesicPath:
    frames: tuple
    start: np.ndarray
    end: np.ndarray
    step_angle: float
    length: float

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, i):
        return self.frames[i]


def geodesic_path(start, end, step_angle=DEFAULT_STEP_ANGLE):
    """Frames spaced ``step_angle`` radians apart (or a little less) from ``start`` to ``end``.

    The frame count is ``ceil(length / step_angle) + 1``. Every frame is
    re-orthonormalized; the endpoints are the inputs themselves.
    """
    if step_angle <= 0:
        raise ValueError("step_angle must be positive")
    start, end = _check_pair(start, end)
    geo = _Geodesic(start, end)
    if geo.length <= RANK_TOL:
        if np.allclose(start, end, rtol=0.0, atol=RANK_TOL):
            frames = (start.copy(),)
        else:
            frames = (start.copy(), end.copy())
        return GeodesicPath(frames, start.copy(), end.copy(), float(step_angle), geo.length)

    n_steps = max(1, math.ceil(geo.length / step_angle - 1e-9))
    frames = [start.copy()]
    for k in range(1, n_steps):
        frames.append(orthonormalize(geo.at(k / n_steps)))
    frames.append(end.copy())
    return GeodesicPath(tuple(frames), start.copy(), end.copy(), float(step_angle), geo.length)


def geodesic_step(start, toward, angle):
    """Basis at signed arc length ``angle`` along the geodesic from ``start`` toward ``toward``."""
    geo = _Geodesic(start, toward)
    if geo.length <= RANK_TOL:
        raise DegenerateBasisError("direction basis coincides with the start basis")
    return orthonormalize(geo.at(angle / geo.length))
