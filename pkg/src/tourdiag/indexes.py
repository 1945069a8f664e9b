"""Projection pursuit index functions.

An index maps projected data ``Y = X @ A`` (n x d) to a single score where
larger means "more interesting". Noisy indexes take an explicit
``numpy.random.Generator``; smooth ones ignore it.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class IndexFunction:
    name: str
    smooth: bool
    evaluator: Callable[[np.ndarray, Optional[np.random.Generator]], float]

    def __call__(self, Y, rng=None):
        return self.evaluator(Y, rng)


def _as_projection(Y):
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2:
        raise ValueError(f"projected data must be 2-D, got shape {Y.shape}")
    if Y.shape[0] == 0:
        raise ValueError("projected data has no rows")
    return Y


def holes(Y, rng=None):
    """Normalized holes index.

    ``(1 - mean_i exp(-|y_i|^2 / 2)) / (1 - exp(-d / 2))``; zero when all the
    mass sits at the origin, large when the centre of the projection is empty.
    """
    Y = _as_projection(Y)
    d = Y.shape[1]
    num = 1.0 - np.mean(np.exp(-0.5 * np.einsum("ij,ij->i", Y, Y)))
    return float(num / (1.0 - np.exp(-0.5 * d)))


def kolmogorov(Y, rng):
    """One-sided ECDF distance from a fresh standard normal sample.

    ``max_x [F_Y(x) - F_ref(x)]`` over the pooled sample points, where the
    reference sample has the same size as ``Y`` and is redrawn on every call.
    """
    Y = _as_projection(Y)
    if Y.shape[1] != 1:
        raise ValueError(f"kolmogorov index needs 1-D projections, got d={Y.shape[1]}")
    if rng is None:
        raise ValueError("kolmogorov index needs an rng for its reference sample")
    y = np.sort(Y[:, 0])
    ref = np.sort(rng.standard_normal(y.size))
    return ecdf_gap(y, ref)


def ecdf_gap(y, ref):
    """``max(F_y - F_ref)`` evaluated at every point of both (sorted) samples."""
    pooled = np.concatenate([y, ref])
    F_y = np.searchsorted(y, pooled, side="right") / y.size
    F_ref = np.searchsorted(ref, pooled, side="right") / ref.size
    return float(np.max(F_y - F_ref))


HOLES = IndexFunction("holes", True, holes)
KOLMOGOROV = IndexFunction("kolmogorov", False, kolmogorov)

INDEXES = {f.name: f for f in (HOLES, KOLMOGOROV)}


def get_index(name):
    try:
        return INDEXES[name]
    except KeyError:
        raise ValueError(f"unknown index {name!r}; choose from {sorted(INDEXES)}") from None


def evaluate(index, X, A, rng=None):
    """Score the projection of data ``X`` (n x p) onto basis ``A`` (p x d)."""
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if X.ndim != 2 or X.shape[1] != A.shape[0]:
        raise ValueError(f"data with shape {X.shape} cannot be projected by a {A.shape} basis")
    if isinstance(index, str):
        index = get_index(index)
    return index(X @ A, rng)
