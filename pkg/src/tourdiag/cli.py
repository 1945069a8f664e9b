"""Command line driver: ``simulate``, ``optimize``, ``sweep`` and ``diagnose``.

Errors are reported as a single JSON line on stderr with a non-zero exit code;
argument errors exit with status 2. ``TOURDIAG_OUTPUT_DIR`` sets the default
output directory of ``sweep`` and ``diagnose``.
"""

import argparse
import glob
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, render, simdata
from .experiments import DATA_SEED, run_sweep, specs_for, write_sweep
from .optimizers import OptimizerConfig, optimize, polish
from .trace import bind_theoretical, deserialize, get_basis_matrix, serialize

OUTPUT_ENV = "TOURDIAG_OUTPUT_DIR"


class CLIError(Exception):
    pass


def _int_range(text):
    """Parse ``1..20`` or ``1,2,5`` into a list of ints."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed list {text!r}") from None


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None


def _str_list(text):
    return [v.strip().lower() for v in text.split(",") if v.strip()]


def _default_out(fallback):
    return os.environ.get(OUTPUT_ENV, fallback)


def build_parser():
    parser = argparse.ArgumentParser(prog="tourdiag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="write a simulated dataset as CSV")
    s.add_argument("--dataset", choices=sorted(simdata.SUBSETS), default="boa5")
    s.add_argument("--n", type=int, default=simdata.DEFAULT_N)
    s.add_argument("--seed", type=int, default=DATA_SEED)
    s.add_argument("--out", required=True)

    o = sub.add_parser("optimize", help="run one optimisation and write its trace")
    o.add_argument("--data", required=False)
    o.add_argument("--index", choices=("holes", "kolmogorov"), default="holes")
    o.add_argument("--method", choices=("crs", "sa", "pd"), default=None)
    o.add_argument("--d", type=int, choices=(1, 2), default=1)
    o.add_argument("--config", help="JSON file with optimizer settings")
    o.add_argument("--trace-out")
    o.add_argument("--polish", action="store_true", help="also polish the final basis")
    o.add_argument("--no-interrupt", action="store_true")
    o.add_argument("--no-orient", action="store_true")
    o.add_argument("--seed", type=int)
    o.add_argument("--alpha0", type=float)
    o.add_argument("--cooling", type=float)
    o.add_argument("--l-max", type=int)
    o.add_argument("--step-angle", type=float)
    o.add_argument("--dump-config", action="store_true",
                   help="print the resolved configuration and exit")

    w = sub.add_parser("sweep", help="seed x search-size x method grid")
    w.add_argument("--seeds", type=_int_range, default=list(range(1, 21)))
    w.add_argument("--alpha0", type=_float_list, default=[0.5, 0.7])
    w.add_argument("--methods", type=_str_list, default=["crs", "sa"])
    w.add_argument("--dataset", choices=sorted(simdata.SUBSETS), default="boa6")
    w.add_argument("--index", choices=("holes", "kolmogorov"), default="kolmogorov")
    w.add_argument("--d", type=int, choices=(1, 2), default=1)
    w.add_argument("--n", type=int, default=simdata.DEFAULT_N)
    w.add_argument("--data-seed", type=int, default=DATA_SEED)
    w.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--out", default=None)

    g = sub.add_parser("diagnose", help="render diagnostics from trace files")
    g.add_argument("--traces", required=True, help="glob of trace files")
    g.add_argument("--kind", choices=("search", "trace", "pca", "tour", "torus"), required=True)
    g.add_argument("--details", action="store_true")
    g.add_argument("--animate", action="store_true")
    g.add_argument("--cutoff", type=int, default=diagnostics.DEFAULT_CUTOFF)
    g.add_argument("--background", type=int, default=diagnostics.DEFAULT_BACKGROUND)
    g.add_argument("--frames", type=int, default=60)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    return parser


def _load_config(args):
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}") from None
    overrides = {
        "method": args.method, "seed": args.seed, "alpha0": args.alpha0,
        "cooling": args.cooling, "l_max": args.l_max, "step_angle": args.step_angle,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.no_interrupt:
        data["interrupt"] = False
    if args.no_orient:
        data["orient"] = False
    data.setdefault("method", "crs")
    return OptimizerConfig.from_dict(data)


def _dataset_kind(columns):
    for kind, cols in simdata.SUBSETS.items():
        if tuple(columns) == cols:
            return kind
    return None


def cmd_simulate(args):
    ds = simdata.make_dataset(args.dataset, args.n, args.seed)
    ds.to_csv(args.out)
    print(json.dumps({"out": str(args.out), "n": ds.n, "p": ds.p, "columns": list(ds.columns)}))


def _polish_path(path):
    path = Path(path)
    return path.with_name(f"{path.stem}_polish{path.suffix}")


def cmd_optimize(args):
    config = _load_config(args)
    if args.dump_config:
        print(json.dumps(config.to_dict(), indent=2, sort_keys=True))
        return
    if not args.data or not args.trace_out:
        raise CLIError("optimize needs --data and --trace-out")
    columns, X = simdata.read_csv(args.data)
    if args.index == "kolmogorov" and args.d != 1:
        raise CLIError("the kolmogorov index works on 1-D projections only")
    if args.d >= X.shape[1]:
        raise CLIError(f"d={args.d} needs more than {X.shape[1]} data columns")
    result = optimize(X, args.index, config, d=args.d)
    kind = _dataset_kind(columns)
    theo = None
    if kind is not None:
        try:
            theo = simdata.theoretical_best(kind, args.d)
        except ValueError:
            theo = None
    result.trace.metadata["columns"] = list(columns)
    if theo is not None:
        bind_theoretical(result.trace, theo)
    serialize(result.trace, args.trace_out)
    summary = {
        "trace": str(args.trace_out), "method": config.method,
        "start_index": result.start_index, "final_index": result.final_index,
        "iterations": result.iterations, "terminated_by": result.terminated_by,
    }
    if args.polish:
        pres = polish(X, args.index, result.final_basis, config.updated(method="polish"))
        if theo is not None:
            bind_theoretical(pres.trace, theo)
        ppath = _polish_path(args.trace_out)
        serialize(pres.trace, ppath)
        summary.update({"polish_trace": str(ppath), "polish_final_index": pres.final_index})
    print(json.dumps(summary))


def cmd_sweep(args):
    out = args.out or _default_out("sweep")
    specs = specs_for(args.seeds, args.alpha0, args.methods, dataset=args.dataset,
                      index=args.index, d=args.d, n=args.n, data_seed=args.data_seed)
    runs = run_sweep(specs, jobs=args.jobs)
    paths = write_sweep(runs, out, args.format)
    print(json.dumps({"out": str(out), "runs": len(paths)}))


def _load_traces(pattern):
    paths = sorted(glob.glob(pattern))
    paths = [p for p in paths if not p.endswith(".meta.json") and not p.endswith("summary.csv")]
    if not paths:
        raise CLIError(f"no trace files match {pattern!r}")
    return paths, [deserialize(p) for p in paths]


def cmd_diagnose(args):
    out = Path(args.out or _default_out("diagnostics"))
    out.mkdir(parents=True, exist_ok=True)
    paths, logs = _load_traces(args.traces)
    rng = np.random.default_rng(args.seed)
    written = []
    if args.kind == "search":
        for p, lg in zip(paths, logs):
            summ = diagnostics.search_summary(lg, args.cutoff)
            stem = Path(p).stem
            summ.to_csv(out / f"{stem}_search.csv")
            written.append(render.render_search(summ, out / f"{stem}_search.svg"))
    elif args.kind == "trace":
        series = [diagnostics.interp_trace(lg) for lg in logs]
        written.append(render.render_trace(series, out / "trace.svg",
                                           labels=[Path(p).stem for p in paths]))
    elif args.kind == "pca":
        emb = diagnostics.pca_embed(logs, args.background, rng)
        diagnostics.write_points_csv(out / "pca_points.csv", emb.coords,
                                     {"source": emb.source.tolist(), "record": emb.record.tolist()})
        target = out / ("pca_frames" if args.animate else "pca.svg")
        res = render.render_embedding(emb, target, details=args.details, animate=args.animate)
        written.extend(res if isinstance(res, list) else [res])
    else:
        shapes = {lg.shape for lg in logs}
        if len(shapes) != 1:
            raise CLIError("traces disagree on basis shape")
        p, d = shapes.pop()
        if args.kind == "torus":
            if d != 2:
                raise CLIError("the torus view needs 2-D bases")
            bg = diagnostics.torus_background(p, args.background, rng)
        else:
            bg = diagnostics.random_flat_bases(p, d, args.background, rng)
        paths_m = [get_basis_matrix(lg, [r for r in lg.records
                                         if r.state in ("start", "interpolation", "final")])
                   for lg in logs]
        points = np.vstack([bg, *paths_m])
        labels = np.concatenate([np.full(len(bg), -1)]
                                + [np.full(len(m), k) for k, m in enumerate(paths_m)])
        frames = diagnostics.basis_space_tour(points, args.frames, rng)
        methods = [lg.metadata.get("method", "") for lg in logs]
        written.extend(render.render_space_tour(frames, out / f"{args.kind}_frames",
                                                labels, methods))
    print(json.dumps({"kind": args.kind, "files": len(written), "out": str(out)}))


COMMANDS = {"simulate": cmd_simulate, "optimize": cmd_optimize,
            "sweep": cmd_sweep, "diagnose": cmd_diagnose}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (CLIError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
