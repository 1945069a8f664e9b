"""Tidy optimisation trace: one row per evaluated basis.

Each row carries its ordinal ``t``, the basis, its index value, the optimiser
state that produced it, the outer/inner loop counters ``j`` and ``l``, the
optimiser name and the neighbourhood size ``alpha``.

Bases are flattened column-major into ``basis_1 ... basis_{p*d}`` when written
to disk. Metadata (``p``, ``d``, index name, seed, config, ...) goes to a
sidecar ``<path>.meta.json``.
"""

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .manifold import random_basis

STATES = (
    "start",
    "random_search",
    "new_basis",
    "interpolation",
    "direction_search",
    "best_direction_search",
    "best_line_search",
    "polish_search",
    "final",
)
SEARCH_STATES = frozenset(
    {"start", "random_search", "new_basis", "direction_search",
     "best_direction_search", "best_line_search", "polish_search"}
)
DIR_SEARCH_STATES = frozenset({"direction_search", "best_direction_search"})

FIXED_COLUMNS = ("t", "method", "state", "j", "l", "alpha", "index_value")


class TraceParseError(ValueError):
    """A trace file could not be parsed; the message names the offending line."""


@dataclass(eq=False)
class TraceRecord:
    t: int
    basis: np.ndarray
    index_value: float
    state: str
    j: int
    l: int
    method: str
    alpha: float

    def __eq__(self, other):
        if not isinstance(other, TraceRecord):
            return NotImplemented
        return (
            self.t == other.t
            and self.state == other.state
            and self.j == other.j
            and self.l == other.l
            and self.method == other.method
            and _same_float(self.alpha, other.alpha)
            and _same_float(self.index_value, other.index_value)
            and self.basis.shape == other.basis.shape
            and np.array_equal(self.basis, other.basis)
        )

    def flat_basis(self):
        return flatten_basis(self.basis)


def _same_float(a, b):
    return a == b or (math.isnan(a) and math.isnan(b))


def flatten_basis(A):
    return np.asarray(A, dtype=float).reshape(-1, order="F")


def unflatten_basis(v, p, d):
    return np.asarray(v, dtype=float).reshape((p, d), order="F")


@dataclass(frozen=True)
class BoundBasis:
    """A basis attached to a log from outside the optimisation (e.g. the known optimum)."""

    basis: np.ndarray
    index_value: float
    label: str = "theoretical"


class TraceLog:
    def __init__(self, metadata=None):
        self.records = []
        self.metadata = dict(metadata or {})
        self.theoretical: Optional[BoundBasis] = None

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __eq__(self, other):
        if not isinstance(other, TraceLog):
            return NotImplemented
        return self.records == other.records and self.metadata == other.metadata

    def append(self, basis, index_value, state, j, l, method, alpha=math.nan):
        rec = TraceRecord(0, np.array(basis, dtype=float), float(index_value), state,
                          int(j), int(l), method, float(alpha))
        return record(self, rec)

    @property
    def shape(self):
        if "p" in self.metadata and "d" in self.metadata:
            return int(self.metadata["p"]), int(self.metadata["d"])
        if self.records:
            return self.records[0].basis.shape
        raise ValueError("log has neither records nor (p, d) metadata")


def record(log, rec):
    """Append ``rec`` to ``log`` with ``t`` set to the previous ``t`` plus one."""
    if rec.state not in STATES:
        raise ValueError(f"unknown state {rec.state!r}")
    if not math.isfinite(rec.index_value):
        raise ValueError(f"index value must be finite, got {rec.index_value}")
    rec.t = log.records[-1].t + 1 if log.records else 1
    log.records.append(rec)
    return rec


# -- accessors ---------------------------------------------------------------

def _where(log, states):
    return [r for r in log.records if r.state in states]


def get_start(log):
    if not log.records:
        raise ValueError("empty trace has no start basis")
    starts = _where(log, {"start"})
    return starts[0] if starts else log.records[0]


def get_best(log):
    """Record with the largest index value; the earliest one wins ties."""
    best = None
    for r in log.records:
        if best is None or r.index_value > best.index_value:
            best = r
    return best


def get_final(log):
    finals = _where(log, {"final"})
    return finals[-1] if finals else None


def get_anchor(log):
    return _where(log, {"new_basis"})


def get_interp(log):
    return _where(log, {"interpolation"})


def get_interp_last(log):
    last = {}
    for r in get_interp(log):
        last[r.j] = r
    return [last[j] for j in sorted(last)]


def get_search(log):
    return _where(log, SEARCH_STATES)


def get_search_count(log):
    counts = {}
    for r in get_search(log):
        counts[r.j] = counts.get(r.j, 0) + 1
    return dict(sorted(counts.items()))


def get_interrupt(log):
    """``(last interpolation, target)`` pairs for legs that stopped short of the target."""
    targets = {r.j: r for r in get_anchor(log)}
    pairs = []
    for last in get_interp_last(log):
        target = targets.get(last.j)
        if target is not None and not np.array_equal(last.basis, target.basis):
            pairs.append((last, target))
    return pairs


def get_dir_search(log):
    return _where(log, DIR_SEARCH_STATES)


def get_basis_matrix(log, records=None):
    recs = log.records if records is None else records
    if not recs:
        p, d = log.shape
        return np.zeros((0, p * d))
    return np.vstack([r.flat_basis() for r in recs])


def get_theo(log):
    return log.theoretical


def bind_theoretical(log, basis, index_value=math.nan):
    log.theoretical = BoundBasis(np.array(basis, dtype=float), float(index_value))
    return log


def bind_random(log, m, rng):
    """``m`` flattened random bases with the same shape as the log's bases."""
    p, d = log.shape
    return random_flat_bases(p, d, m, rng)


def bind_random_matrix(matrix, p, d, m, rng):
    return np.vstack([np.asarray(matrix, dtype=float).reshape(-1, p * d),
                      random_flat_bases(p, d, m, rng)])


def random_flat_bases(p, d, m, rng):
    out = np.empty((m, p * d))
    for i in range(m):
        out[i] = flatten_basis(random_basis(p, d, rng))
    return out


# -- serialization -----------------------------------------------------------

def _fmt(v):
    return format(float(v), ".17g")


def metadata_path(path):
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def _infer_format(path, fmt):
    if fmt is not None:
        fmt = fmt.lower()
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown trace format {fmt!r}")
        return fmt
    return "jsonl" if str(path).endswith((".jsonl", ".ndjson")) else "csv"


def _full_metadata(log):
    meta = dict(log.metadata)
    p, d = log.shape
    meta["p"], meta["d"] = p, d
    meta["basis_order"] = "column-major"
    if log.theoretical is not None:
        meta["theoretical"] = {
            "basis": [float(v) for v in flatten_basis(log.theoretical.basis)],
            "index_value": None if math.isnan(log.theoretical.index_value)
            else log.theoretical.index_value,
        }
    return meta


def serialize(log, path, fmt=None):
    """Write ``log`` as CSV or JSONL plus its metadata sidecar."""
    path = Path(path)
    fmt = _infer_format(path, fmt)
    p, d = log.shape
    k = p * d
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(FIXED_COLUMNS + tuple(f"basis_{i + 1}" for i in range(k)))
            for r in log.records:
                w.writerow([r.t, r.method, r.state, r.j, r.l, _fmt(r.alpha), _fmt(r.index_value)]
                           + [_fmt(v) for v in r.flat_basis()])
    else:
        with open(path, "w") as fh:
            for r in log.records:
                alpha = "null" if math.isnan(r.alpha) else _fmt(r.alpha)
                fh.write(
                    f'{{"t": {r.t}, "method": {json.dumps(r.method)}, '
                    f'"state": {json.dumps(r.state)}, "j": {r.j}, "l": {r.l}, '
                    f'"alpha": {alpha}, "index_value": {_fmt(r.index_value)}, '
                    f'"basis": [{", ".join(_fmt(v) for v in r.flat_basis())}]}}\n'
                )
    with open(metadata_path(path), "w") as fh:
        json.dump(_full_metadata(log), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_metadata(path):
    mp = metadata_path(path)
    if not mp.exists():
        return {}
    with open(mp) as fh:
        return json.load(fh)


def _restore(log, meta):
    theo = meta.pop("theoretical", None)
    meta.pop("basis_order", None)
    log.metadata = meta
    if theo is not None:
        p, d = int(meta["p"]), int(meta["d"])
        iv = theo.get("index_value")
        bind_theoretical(log, unflatten_basis(theo["basis"], p, d),
                         math.nan if iv is None else iv)


def deserialize(path, fmt=None):
    path = Path(path)
    fmt = _infer_format(path, fmt)
    meta = _read_metadata(path)
    log = TraceLog()
    recs = _read_csv(path, meta) if fmt == "csv" else _read_jsonl(path, meta)
    log.records = recs
    if "p" not in meta and recs:
        meta["p"], meta["d"] = recs[0].basis.shape
    _restore(log, meta)
    return log


def _shape_for(meta, k):
    d = int(meta.get("d", 1))
    p = int(meta.get("p", k // d))
    if p * d != k:
        raise TraceParseError(f"metadata shape ({p}, {d}) does not match {k} basis columns")
    return p, d


def _check_state(state, lineno):
    if state not in STATES:
        raise TraceParseError(f"line {lineno}: unknown state {state!r}")


def _read_csv(path, meta):
    recs = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceParseError(f"{path}: line 1: missing header") from None
        if tuple(header[:len(FIXED_COLUMNS)]) != FIXED_COLUMNS:
            raise TraceParseError(f"{path}: line 1: unexpected header {header[:7]}")
        k = len(header) - len(FIXED_COLUMNS)
        expected = [f"basis_{i + 1}" for i in range(k)]
        if header[len(FIXED_COLUMNS):] != expected or k == 0:
            raise TraceParseError(f"{path}: line 1: basis columns must be basis_1..basis_k")
        p, d = _shape_for(meta, k)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise TraceParseError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                t, method, state, j, l = int(row[0]), row[1], row[2], int(row[3]), int(row[4])
                alpha, iv = float(row[5]), float(row[6])
                flat = [float(v) for v in row[7:]]
            except ValueError as exc:
                raise TraceParseError(f"{path}: line {lineno}: {exc}") from None
            _check_state(state, lineno)
            recs.append(TraceRecord(t, unflatten_basis(flat, p, d), iv, state, j, l, method, alpha))
    return recs


def _read_jsonl(path, meta):
    recs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                flat = [float(v) for v in obj["basis"]]
                p, d = _shape_for(meta, len(flat))
                alpha = math.nan if obj["alpha"] is None else float(obj["alpha"])
                rec = TraceRecord(int(obj["t"]), unflatten_basis(flat, p, d),
                                  float(obj["index_value"]), obj["state"], int(obj["j"]),
                                  int(obj["l"]), obj["method"], alpha)
            except (ValueError, KeyError, TypeError) as exc:
                raise TraceParseError(f"{path}: line {lineno}: {exc}") from None
            _check_state(rec.state, lineno)
            recs.append(rec)
    return recs
