"""Data products behind the four diagnostic views of an optimisation trace.

These functions only compute numbers; :mod:`tourdiag.render` draws them.
"""

import csv
from copy import deepcopy
from dataclasses import dataclass, field

import numpy as np

from .linalg import jacobi_eigh
from .manifold import geodesic_path, random_basis
from .trace import (
    TraceLog,
    flatten_basis,
    get_anchor,
    get_basis_matrix,
    get_search,
    random_flat_bases,
)

DEFAULT_CUTOFF = 15
DEFAULT_BACKGROUND = 1000

# -- search summary ----------------------------------------------------------


@dataclass(frozen=True)
class IterationSummary:
    j: int
    tries: int
    values: tuple
    q1: float
    median: float
    q3: float
    accepted_index: float
    accepted_flag: bool
    point_display: bool
    last_iteration: bool


@dataclass(frozen=True)
class SearchSummary:
    method: str
    cutoff: int
    rows: tuple

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["j", "tries", "q1", "median", "q3", "accepted_index",
                        "accepted_flag", "point_display", "last_iteration"])
            for r in self.rows:
                w.writerow([r.j, r.tries, _f(r.q1), _f(r.median), _f(r.q3),
                            _f(r.accepted_index), int(r.accepted_flag),
                            int(r.point_display), int(r.last_iteration)])


def _f(v):
    return format(float(v), ".17g")


def search_summary(log, cutoff=DEFAULT_CUTOFF):
    """Per outer iteration: number of tries, quartiles and the accepted value.

    Iterations with at most ``cutoff`` tries are flagged for point display
    instead of a boxplot. The last iteration is flagged as the one that found
    nothing better.
    """
    by_j = {}
    for r in get_search(log):
        by_j.setdefault(r.j, []).append(r)
    anchors = {r.j: r for r in get_anchor(log)}
    method = log.metadata.get("method", log.records[0].method if log.records else "")
    js = sorted(by_j)
    rows = []
    for j in js:
        recs = by_j[j]
        values = np.array([r.index_value for r in recs])
        q1, med, q3 = np.percentile(values, [25, 50, 75])
        if j in anchors:
            acc, flag = anchors[j].index_value, True
        else:
            acc, flag = float(values.max()), False
            if recs[0].state == "start":
                flag = True
        rows.append(IterationSummary(j, len(recs), tuple(values.tolist()), float(q1),
                                     float(med), float(q3), float(acc), flag,
                                     len(recs) <= cutoff, j == js[-1]))
    return SearchSummary(method, cutoff, tuple(rows))


# -- index trace over time ---------------------------------------------------


@dataclass(frozen=True)
class TracePoint:
    t: int
    index_value: float
    state: str
    j: int


def interp_trace(log):
    """Interpolation and new-target records in time order."""
    return [TracePoint(r.t, r.index_value, r.state, r.j)
            for r in log.records if r.state in ("interpolation", "new_basis")]


# -- PCA embedding of the basis space ----------------------------------------


@dataclass
class Embedding:
    coords: np.ndarray
    center: np.ndarray
    radius: float
    flipped: tuple
    components: np.ndarray
    mean: np.ndarray
    # per-point provenance: log number (-1 background, -2 zero matrix) and record position
    source: np.ndarray = field(repr=False)
    record: np.ndarray = field(repr=False)
    logs: tuple = field(default=(), repr=False)
    p: int = 0
    d: int = 0

    def project(self, flat):
        flat = np.atleast_2d(np.asarray(flat, dtype=float))
        return (flat - self.mean) @ self.components

    def project_basis(self, A):
        return self.project(flatten_basis(A))[0]

    def log_coords(self, k):
        return self.coords[self.source == k]

    def log_records(self, k):
        return self.logs[k].records

    @property
    def background(self):
        return self.coords[self.source == -1]


def pca(M, k=2):
    """Top-``k`` principal directions of the rows of ``M`` (mean-centred)."""
    M = np.asarray(M, dtype=float)
    mean = M.mean(axis=0)
    C = M - mean
    cov = C.T @ C / max(M.shape[0] - 1, 1)
    w, V = jacobi_eigh(cov)
    return mean, V[:, :k], w[:k]


def flip_logs(logs):
    """Flip each log whose end basis points away from the first log's end basis.

    Returns the flip flags; bases in flipped logs are negated in place.
    """
    flags = [False]
    if not logs:
        return ()
    ref = logs[0].records[-1].flat_basis()
    for log in logs[1:]:
        end = log.records[-1].flat_basis()
        flip = float(ref @ end) < 0
        if flip:
            for r in log.records:
                r.basis = -r.basis
        flags.append(flip)
    return tuple(flags)


def pca_embed(logs, m_background=DEFAULT_BACKGROUND, rng=None, background=None, flip=True):
    """Embed every logged basis, random background bases and the zero matrix in 2-D.

    Logs are copied before any sign flip, so the inputs are left untouched.
    ``background`` may be given directly as flattened bases; otherwise
    ``m_background`` of them are drawn from ``rng``.
    """
    if isinstance(logs, TraceLog):
        logs = [logs]
    logs = [deepcopy(lg) for lg in logs]
    if not logs:
        raise ValueError("need at least one trace")
    shapes = {lg.shape for lg in logs}
    if len(shapes) != 1:
        raise ValueError(f"traces disagree on basis shape: {sorted(shapes)}")
    p, d = shapes.pop()
    flags = flip_logs(logs) if flip else tuple(False for _ in logs)

    blocks, source, record = [], [], []
    for k, lg in enumerate(logs):
        M = get_basis_matrix(lg)
        blocks.append(M)
        source.append(np.full(len(M), k))
        record.append(np.arange(len(M)))
    if background is None:
        if m_background and rng is None:
            raise ValueError("drawing background bases needs an rng")
        background = random_flat_bases(p, d, m_background, rng) if m_background else np.zeros((0, p * d))
    background = np.asarray(background, dtype=float).reshape(-1, p * d)
    blocks.append(background)
    source.append(np.full(len(background), -1))
    record.append(np.arange(len(background)))
    blocks.append(np.zeros((1, p * d)))
    source.append(np.array([-2]))
    record.append(np.array([0]))

    M = np.vstack(blocks)
    if M.shape[0] < 3:
        raise ValueError("need at least three points to embed")
    mean, comps, _ = pca(M, 2)
    coords = (M - mean) @ comps
    center = coords[-1].copy()  # the zero matrix is the last row
    radius = float(np.max(np.linalg.norm(coords - center, axis=1)))
    return Embedding(coords, center, radius, flags, comps, mean,
                     np.concatenate(source), np.concatenate(record), tuple(logs), p, d)


# -- tour of the full basis space --------------------------------------------


@dataclass(frozen=True)
class TourFrame:
    projection: np.ndarray
    coords: np.ndarray


def basis_space_tour(points, n_frames, rng, step_angle=0.05):
    """Grand tour over the flattened basis space.

    Random 2-frames in ``p*d`` dimensions are joined by geodesic paths; each
    output frame holds the projection matrix and the 2-D image of ``points``.
    """
    points = np.asarray(points, dtype=float)
    dim = points.shape[1]
    if dim < 3:
        raise ValueError("the flattened basis space needs at least 3 dimensions for a 2-D tour")
    if n_frames < 1:
        raise ValueError("n_frames must be positive")
    current = random_basis(dim, 2, rng)
    frames = [current]
    while len(frames) < n_frames:
        target = random_basis(dim, 2, rng)
        path = geodesic_path(current, target, step_angle)
        frames.extend(path.frames[1:])
        current = target
    frames = frames[:n_frames]
    return [TourFrame(F, points @ F) for F in frames]


def torus_background(p, n, rng):
    """``n`` flattened random ``p x 2`` bases; for ``p = 3`` these trace out a torus."""
    return random_flat_bases(p, 2, n, rng)


def nearest_sign_distance(emb, flat, target_basis):
    """Embedding distance from ``flat`` to the closer of ``+target`` and ``-target``."""
    pt = emb.project(flat)[0]
    t = flatten_basis(target_basis)
    return min(float(np.linalg.norm(pt - emb.project(s * t)[0])) for s in (1.0, -1.0))


def write_points_csv(path, coords, extra=None):
    """Dump 2-D coordinates (plus optional label columns) for external plotting."""
    coords = np.asarray(coords, dtype=float)
    extra = extra or {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", *extra])
        for i, (x, y) in enumerate(coords):
            w.writerow([_f(x), _f(y), *(col[i] for col in extra.values())])
