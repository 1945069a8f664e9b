"""Seed sweep on the noisy kolmogorov index: how far do CRS, SA and PD get?

    python demos/noisy_index.py --out demo_output/noisy --jobs 4
"""

import argparse
from pathlib import Path

import numpy as np

from tourdiag import diagnostics, render, simdata
from tourdiag.experiments import run_sweep, specs_for, write_sweep
from tourdiag.indexes import evaluate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_output/noisy")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)

    data = simdata.boa5(1000, 1)
    best = simdata.theoretical_best("boa5", 1)
    reps = np.random.default_rng(7).spawn(100)
    target = np.mean([evaluate("kolmogorov", data.values, best, r) for r in reps])
    print(f"index at the best direction, averaged over 100 draws: {target:.4f}")

    seeds = range(1, args.seeds + 1)
    specs = specs_for(seeds, [0.5], ["crs", "sa", "pd"], dataset="boa5")
    runs = run_sweep(specs, jobs=args.jobs)
    write_sweep(runs, out)
    for method in ("crs", "sa", "pd"):
        mine = [r for r in runs if r.spec.method == method]
        final = np.median([r.result.final_index for r in mine])
        gain = np.median([(r.result.final_index - r.result.start_index) / r.result.start_index
                          for r in mine])
        align = np.median([abs(float(r.result.final_basis[:, 0] @ best[:, 0])) for r in mine])
        print(f"{method:>3}: median final {final:.4f} ({final / target:.0%} of best), "
              f"median relative gain {gain:.2f}, median |cos| to best {align:.3f}")

    logs = [r.result.trace for r in runs if r.spec.seed == 1]
    emb = diagnostics.pca_embed(logs, 1000, np.random.default_rng(0))
    render.render_embedding(emb, out / "pca_seed1.svg", theoretical=best)
    print(f"wrote traces and pca_seed1.svg to {out}")


if __name__ == "__main__":
    main()
