"""Why the target basis is sign-matched before interpolating.

Without the check, a leg toward -A instead of A takes the long way round and
the index along the path dips even though both ends project identically.

    python demos/orientation.py
"""

import numpy as np

from tourdiag import simdata
from tourdiag.indexes import evaluate
from tourdiag.manifold import alignment_det, geodesic_path, orient_match, orthonormalize


def leg_values(X, start, target):
    return [evaluate("holes", X, F) for F in geodesic_path(start, target).frames]


def main():
    data = simdata.boa5(1000, 1)
    rng = np.random.default_rng(2)
    best = simdata.theoretical_best("boa5", 1)
    # start close to the optimum, then aim at its mirror image
    start = orthonormalize(best + 0.4 * rng.standard_normal((5, 1)))
    target = -best
    print(f"det(start^T target) = {alignment_det(start, target):+.3f}")
    raw = leg_values(data.values, start, target)
    fixed = leg_values(data.values, start, orient_match(start, target))
    print(f"unmatched leg: {len(raw)} frames, lowest index {min(raw):.4f}")
    print(f"matched leg:   {len(fixed)} frames, lowest index {min(fixed):.4f}")
    print(f"both end at {raw[-1]:.4f}")


if __name__ == "__main__":
    main()
