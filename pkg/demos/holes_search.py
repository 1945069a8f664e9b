"""Walk through one CRS and one SA run on the holes index and draw every diagnostic.

    python demos/holes_search.py --out demo_output/holes
"""

import argparse
from pathlib import Path

import numpy as np

from tourdiag import diagnostics, render, simdata
from tourdiag.optimizers import OptimizerConfig, crs, polish, sa
from tourdiag.trace import bind_theoretical, serialize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_output/holes")
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    data = simdata.boa6(1000, 1)
    best = simdata.theoretical_best("boa6", 2)
    runs = {
        "crs": crs(data.values, "holes", OptimizerConfig(seed=args.seed), d=2),
        "sa": sa(data.values, "holes", OptimizerConfig(method="sa", seed=args.seed), d=2),
    }
    for name, res in runs.items():
        bind_theoretical(res.trace, best)
        serialize(res.trace, out / f"{name}.csv")
        print(f"{name}: {res.start_index:.4f} -> {res.final_index:.4f} "
              f"in {res.iterations} iterations ({res.terminated_by})")
        render.render_search(diagnostics.search_summary(res.trace), out / f"{name}_search.svg")

    # crs keeps climbing inside each leg, sa accepts some worse targets
    series = [diagnostics.interp_trace(r.trace) for r in runs.values()]
    render.render_trace(series, out / "trace.svg", labels=list(runs))

    # the crs end point still sits a little off the optimum; polish closes the gap
    pol = polish(data.values, "holes", runs["crs"].final_basis, OptimizerConfig(seed=args.seed))
    print(f"polish: {runs['crs'].final_index:.4f} -> {pol.final_index:.4f}")

    logs = [r.trace for r in runs.values()]
    emb = diagnostics.pca_embed(logs, 1000, np.random.default_rng(0))
    render.render_embedding(emb, out / "pca.svg", details=True)
    render.render_embedding(emb, out / "pca_frames", animate=True)
    print(f"wrote diagnostics to {out}")


if __name__ == "__main__":
    main()
