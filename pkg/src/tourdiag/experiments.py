"""Seed sweeps: many independent optimisations over a fixed dataset.

Every run is a pure function of its :class:`RunSpec`, so sweeps can be farmed
out to worker processes and still reproduce byte-for-byte.
"""

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import simdata
from .manifold import geodesic_distance
from .optimizers import OptimizerConfig, optimize, polish
from .trace import bind_theoretical, serialize

DATA_SEED = 1


@dataclass(frozen=True)
class RunSpec:
    seed: int
    method: str
    alpha0: float = 0.5
    dataset: str = "boa6"
    index: str = "kolmogorov"
    d: int = 1
    n: int = simdata.DEFAULT_N
    data_seed: int = DATA_SEED
    overrides: dict = field(default_factory=dict)
    polish: bool = False

    @property
    def name(self):
        return f"{self.method}_a{self.alpha0:g}_s{self.seed}"

    def config(self):
        return OptimizerConfig(method=self.method, seed=self.seed, alpha0=self.alpha0,
                               **self.overrides)


@dataclass
class SweepRun:
    spec: RunSpec
    result: object
    polished: Optional[object] = None
    dist_to_theoretical: float = float("nan")


_DATA_CACHE = {}


def _dataset(kind, n, seed):
    key = (kind, n, seed)
    if key not in _DATA_CACHE:
        _DATA_CACHE[key] = simdata.make_dataset(kind, n, seed)
    return _DATA_CACHE[key]


def theoretical_for(kind, d):
    try:
        return simdata.theoretical_best(kind, d)
    except ValueError:
        return None


def run_spec(spec):
    data = _dataset(spec.dataset, spec.n, spec.data_seed)
    result = optimize(data.values, spec.index, spec.config(), d=spec.d)
    theo = theoretical_for(spec.dataset, spec.d)
    result.trace.metadata["dataset"] = spec.dataset
    result.trace.metadata["data_seed"] = spec.data_seed
    dist = float("nan")
    if theo is not None:
        bind_theoretical(result.trace, theo)
        dist = geodesic_distance(result.final_basis, theo)
    polished = None
    if spec.polish:
        polished = polish(data.values, spec.index, result.final_basis,
                          spec.config().updated(method="polish"))
    return SweepRun(spec, result, polished, dist)


def specs_for(seeds, alphas, methods, **common):
    return [RunSpec(seed=s, method=m, alpha0=a, **common)
            for m in methods for a in alphas for s in seeds]


def run_sweep(specs, jobs=1):
    """Run every spec, in input order; ``jobs > 1`` uses worker processes."""
    specs = list(specs)
    if jobs <= 1:
        return [run_spec(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_spec, specs, chunksize=max(1, len(specs) // (4 * jobs))))


SUMMARY_COLUMNS = ("run", "method", "alpha0", "seed", "start_index", "final_index",
                   "dist_to_theoretical", "run_length", "iterations", "terminated_by")


def write_sweep(runs, out_dir, fmt="csv"):
    """Write one trace per run plus ``summary.csv``; returns the trace paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for r in runs:
        p = out / f"{r.spec.name}.{fmt}"
        serialize(r.result.trace, p)
        paths.append(p)
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in runs:
            res = r.result
            w.writerow([r.spec.name, r.spec.method, format(r.spec.alpha0, "g"), r.spec.seed,
                        format(res.start_index, ".17g"), format(res.final_index, ".17g"),
                        format(r.dist_to_theoretical, ".17g"), len(res.trace),
                        res.iterations, res.terminated_by])
    return paths


def default_jobs():
    return max(1, min(8, os.cpu_count() or 1))
