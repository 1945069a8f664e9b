"""Projection pursuit optimisers over orthonormal bases, with traced runs and
diagnostic views of how each optimiser searched."""

from .indexes import HOLES, KOLMOGOROV, evaluate, holes, kolmogorov
from .manifold import (
    geodesic_distance,
    geodesic_path,
    linear_blend,
    orient_match,
    orthonormalize,
    random_basis,
)
from .optimizers import OptimizerConfig, RunResult, crs, optimize, pd, polish, sa
from .trace import TraceLog, TraceRecord, deserialize, serialize

__version__ = "0.1.0"
