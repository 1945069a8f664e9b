"""Simulated ten-variable dataset and the ``boa5`` / ``boa6`` subsets.

``x1`` and ``x8``-``x10`` are standard normal noise, ``x2`` and ``x4``-``x7``
are normal mixtures, ``x3`` is a fair +/-1 coin. Columns are centred and scaled
to unit sample variance after drawing.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

DEFAULT_N = 1000


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str  # "normal", "mixture" or "two_point"
    means: tuple = (0.0,)
    sds: tuple = (1.0,)
    weights: tuple = (1.0,)

    def __post_init__(self):
        if self.kind not in ("normal", "mixture", "two_point"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if not np.isclose(sum(self.weights), 1.0):
            raise ValueError(f"mixture weights for {self.name} do not sum to 1")
        if not len(self.means) == len(self.sds) == len(self.weights):
            raise ValueError(f"component lists for {self.name} differ in length")

    def draw(self, n, rng):
        if self.kind == "two_point":
            return np.where(rng.random(n) < 0.5, -1.0, 1.0)
        if self.kind == "normal":
            return self.means[0] + self.sds[0] * rng.standard_normal(n)
        comp = rng.choice(len(self.weights), size=n, p=np.asarray(self.weights))
        means = np.asarray(self.means)[comp]
        sds = np.asarray(self.sds)[comp]
        return means + sds * rng.standard_normal(n)


def _noise(name):
    return ColumnSpec(name, "normal")


COLUMNS = (
    _noise("x1"),
    ColumnSpec("x2", "mixture", (-3.0, 3.0), (1.0, 1.0), (0.5, 0.5)),
    ColumnSpec("x3", "two_point"),
    ColumnSpec("x4", "mixture", (-3.0, 3.0), (1.0, 1.0), (0.25, 0.75)),
    ColumnSpec("x5", "mixture", (-5.0, 0.0, 5.0), (1.0, 1.0, 1.0), (1 / 3, 1 / 3, 1 / 3)),
    ColumnSpec("x6", "mixture", (-5.0, 0.0, 5.0), (1.0, 1.0, 1.0), (0.45, 0.1, 0.45)),
    ColumnSpec("x7", "mixture", (-5.0, 5.0), (1.0, 1.0), (0.5, 0.5)),
    _noise("x8"),
    _noise("x9"),
    _noise("x10"),
)

SUBSETS = {
    "full10": tuple(c.name for c in COLUMNS),
    "boa5": ("x2", "x1", "x8", "x9", "x10"),
    "boa6": ("x2", "x7", "x1", "x8", "x9", "x10"),
}

# signal columns of the known optimum, per (dataset, d)
_BEST_COLUMNS = {
    ("boa5", 1): ("x2",),
    ("boa6", 1): ("x7",),
    ("boa6", 2): ("x2", "x7"),
}


@dataclass(frozen=True)
class Dataset:
    name: str
    columns: tuple
    values: np.ndarray
    raw: np.ndarray = field(repr=False)
    scaled: bool = True
    seed: int = 0

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def column(self, name, raw=False):
        j = self.columns.index(name)
        return (self.raw if raw else self.values)[:, j]

    def to_csv(self, path):
        write_csv(path, self.columns, self.values)


def standardize(raw):
    raw = np.asarray(raw, dtype=float)
    sd = raw.std(axis=0, ddof=1)
    if np.any(sd == 0):
        raise ValueError("cannot scale a constant column")
    return (raw - raw.mean(axis=0)) / sd


def generate(n=DEFAULT_N, seed=0):
    """All ten columns, drawn in order from one PCG64 stream seeded by ``seed``."""
    if n < 2:
        raise ValueError("need at least two observations")
    rng = np.random.default_rng(seed)
    raw = np.column_stack([spec.draw(n, rng) for spec in COLUMNS])
    return Dataset("full10", SUBSETS["full10"], standardize(raw), raw, True, seed)


def subset(dataset, names, label):
    idx = [dataset.columns.index(c) for c in names]
    return Dataset(label, tuple(names), dataset.values[:, idx], dataset.raw[:, idx],
                   dataset.scaled, dataset.seed)


def boa5(n=DEFAULT_N, seed=0):
    return subset(generate(n, seed), SUBSETS["boa5"], "boa5")


def boa6(n=DEFAULT_N, seed=0):
    return subset(generate(n, seed), SUBSETS["boa6"], "boa6")


def make_dataset(kind, n=DEFAULT_N, seed=0):
    if kind not in SUBSETS:
        raise ValueError(f"unknown dataset {kind!r}; choose from {sorted(SUBSETS)}")
    full = generate(n, seed)
    return full if kind == "full10" else subset(full, SUBSETS[kind], kind)


def theoretical_best(kind, d):
    """Axis-aligned basis picking the signal column(s) of ``kind``."""
    try:
        picks = _BEST_COLUMNS[(kind, d)]
    except KeyError:
        raise ValueError(f"no known optimum for dataset {kind!r} with d={d}") from None
    cols = SUBSETS[kind]
    A = np.zeros((len(cols), d))
    for k, name in enumerate(picks):
        A[cols.index(name), k] = 1.0
    return A


def write_csv(path, columns, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in np.asarray(values):
            w.writerow([format(float(v), ".17g") for v in row])


def read_csv(path):
    """Load a numeric CSV with a header row; returns ``(columns, values)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = tuple(rows[0]), rows[1:]
    try:
        values = np.array([[float(v) for v in r] for r in body if r], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None
    if values.ndim != 2 or values.shape[1] != len(header):
        raise ValueError(f"{path}: rows do not match the {len(header)}-column header")
    return header, values
