"""Command-line entry point: ``rdpc <subcommand> [options]``.

Every subcommand writes its artifacts into ``--out-dir`` (default ``.``).
Options may also come from a JSON document given with ``--config``; keys
are option names with dashes replaced by underscores, and explicit flags
win over the file.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .application import (
    ingest_csv,
    make_consumption_standin,
    outlier_split,
    profile,
    profile_csv,
)
from .bench import METHODS, run_benchmark, sensitivity_grid
from .clustering import LINKAGES, agglomerate, cut, kmeans
from .dissimilarity import MEASURES, DegenerateInputError, pairwise_matrix
from .evaluation import accuracy
from .selection import detect_elbows, elbow_curve
from .synthetic import PRESET_NAMES, generate, preset

STANDIN = "pea-standin"


def _measure_opts(p):
    p.add_argument("--measure", choices=MEASURES, default="rdpc")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--weights", default="uniform", choices=("uniform", "increasing", "decreasing"))
    p.add_argument("--linkage", choices=LINKAGES, default="complete")


def _common(p):
    p.add_argument("--out-dir", default=".")
    p.add_argument("--config", help="JSON file with option defaults")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rdpc", description="RDPC time series clustering toolkit")
    ap.add_argument("--version", action="version", version=f"rdpc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labelled synthetic dataset")
    p.add_argument("--preset", required=True, choices=PRESET_NAMES + (STANDIN,))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-labels", action="store_true", help="omit the label column")
    _common(p)

    p = sub.add_parser("dist", help="pairwise dissimilarity matrix of a series CSV")
    p.add_argument("input")
    _measure_opts(p)
    p.add_argument("--n-jobs", type=int, default=1)
    _common(p)

    p = sub.add_parser("cluster", help="cluster a series CSV into k groups")
    p.add_argument("input")
    p.add_argument("--k", type=int, help="number of clusters (required)")
    p.add_argument("--method", choices=("hierarchical", "kmeans"), default="hierarchical")
    p.add_argument("--seed", type=int, default=0)
    _measure_opts(p)
    _common(p)

    p = sub.add_parser("elbow", help="within-cluster score curve and elbow points")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("input", nargs="?")
    src.add_argument("--preset", choices=PRESET_NAMES)
    p.add_argument("--method", choices=("hierarchical", "kmeans"), default="hierarchical")
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    _measure_opts(p)
    _common(p)

    p = sub.add_parser("eval", help="accuracy of predicted labels against true labels")
    p.add_argument("true_labels")
    p.add_argument("pred_labels")
    _common(p)

    p = sub.add_parser("profile", help="per-cluster yearly statistics of a consumption CSV")
    p.add_argument("input")
    p.add_argument("--labels", required=True, help="labels CSV (id,label)")
    p.add_argument("--trend-threshold", type=float, default=0.10)
    _common(p)

    p = sub.add_parser("outlier-split", help="separate high-usage users from regular ones")
    p.add_argument("input")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--weights", default="uniform", choices=("uniform", "increasing", "decreasing"))
    p.add_argument("--linkage", choices=LINKAGES, default="complete")
    p.add_argument("--stop-ratio", type=float, default=4.0)
    p.add_argument("--max-fraction", type=float, default=0.25)
    _common(p)

    p = sub.add_parser("bench", help="accuracy sweep over the synthetic presets")
    p.add_argument("--seed", type=int, help="master seed (required)")
    p.add_argument("--seeds", type=int, default=10, help="datasets per preset")
    p.add_argument("--presets", nargs="+", choices=PRESET_NAMES, default=list(PRESET_NAMES))
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--linkage", choices=LINKAGES, default="complete")
    p.add_argument("--elbows", action="store_true", help="also record elbow points")
    p.add_argument("--sensitivity", action="store_true", help="also emit the alpha x p grid")
    p.add_argument("--sensitivity-seeds", type=int, default=3)
    p.add_argument("--n-jobs", type=int, default=1)
    _common(p)
    return ap


_REQUIRED = {"cluster": ("k",), "bench": ("seed",)}


def _parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "config", None):
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
        sub = ap._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        extra = set(cfg) - known
        if extra:
            raise ValueError(f"{args.config}: unknown option(s) {sorted(extra)}")
        sub.set_defaults(**cfg)
        args = ap.parse_args(argv)
    # may come from the config file, so checked only after merging it
    for dest in _REQUIRED.get(args.command, ()):
        if getattr(args, dest) is None:
            ap.error(f"{args.command}: --{dest} is required (flag or config key)")
    return args


def _read_series(path):
    return ingest_csv(path, require_nonnegative=False, drop_zero_rows=False)


def _labels_from_file(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: file is empty")
    head = [h.strip() for h in rows[0]]
    if "label" not in head:
        raise ValueError(f"{path}: no 'label' column")
    li = head.index("label")
    out = {}
    for ln, r in enumerate(rows[1:], start=2):
        if not r:
            continue
        if len(r) <= li:
            raise ValueError(f"{path}: line {ln}: missing label")
        out[r[0].strip()] = r[li].strip()
    return out


def _write(out_dir, name, text):
    path = Path(out_dir) / name
    path.write_text(text)
    return path


def _labels_csv(ids, labels):
    lines = ["id,label"] + [f"{i},{int(l)}" for i, l in zip(ids, labels)]
    return "\n".join(lines) + "\n"


def _matrix(ds, args, **kw):
    try:
        return pairwise_matrix(ds.usage, args.measure, **kw, **_measure_params(args))
    except DegenerateInputError as exc:
        if isinstance(exc.index, int):
            raise DegenerateInputError(f"series {ds.ids[exc.index]!r} is constant", exc.index) from exc
        raise


def _measure_params(args):
    if args.measure == "rdpc":
        return {"alpha": args.alpha, "p": args.p, "weights": args.weights}
    return {}


def cmd_gen(args):
    if args.preset == STANDIN:
        ds = make_consumption_standin(args.seed)
        path = _write(args.out_dir, f"{STANDIN}_seed{args.seed}.csv", ds.to_csv(with_labels=not args.no_labels))
        return [path]
    ds = generate(preset(args.preset, seed=args.seed))
    stem = f"{args.preset}_seed{args.seed}"
    return [
        _write(args.out_dir, stem + ".csv", ds.to_csv(with_labels=not args.no_labels)),
        _write(args.out_dir, stem + ".spec.json", ds.spec.to_json(indent=2) + "\n"),
    ]


def cmd_dist(args):
    ds = _read_series(args.input)
    D = _matrix(ds, args, n_jobs=args.n_jobs)
    rows = ["id," + ",".join(ds.ids)]
    for sid, row in zip(ds.ids, D.values):
        rows.append(sid + "," + ",".join(repr(float(v)) for v in row))
    return [_write(args.out_dir, "matrix.csv", "\n".join(rows) + "\n")]


def cmd_cluster(args):
    ds = _read_series(args.input)
    if args.method == "kmeans":
        res = kmeans(ds.usage, args.k, seed=args.seed)
        return [_write(args.out_dir, "labels.csv", _labels_csv(ds.ids, res.labels))]
    D = _matrix(ds, args)
    tree = agglomerate(D, args.linkage)
    return [
        _write(args.out_dir, "labels.csv", _labels_csv(ds.ids, cut(tree, args.k))),
        _write(args.out_dir, "dendrogram.json", tree.to_json(indent=1) + "\n"),
    ]


def cmd_elbow(args):
    if args.preset:
        X = generate(preset(args.preset, seed=args.seed)).series
    else:
        X = _read_series(args.input).usage
    curve = elbow_curve(
        X, args.method, args.measure, (args.k_min, args.k_max),
        linkage=args.linkage, seed=args.seed, **_measure_params(args),
    )
    elbows = detect_elbows(curve)
    return [
        _write(args.out_dir, "elbow.csv", curve.to_csv()),
        _write(args.out_dir, "elbows.json", json.dumps({"method": curve.method, "elbows": elbows}) + "\n"),
    ]


def cmd_eval(args):
    true = _labels_from_file(args.true_labels)
    pred = _labels_from_file(args.pred_labels)
    missing = [i for i in true if i not in pred]
    if missing:
        raise ValueError(f"{args.pred_labels}: no label for id {missing[0]!r}")
    ids = list(true)
    acc = accuracy([true[i] for i in ids], [pred[i] for i in ids])
    print(f"accuracy {acc:.4f}")
    return []


def cmd_profile(args):
    ds = ingest_csv(args.input)
    lab = _labels_from_file(args.labels)
    missing = [i for i in ds.ids if i not in lab]
    if missing:
        raise ValueError(f"{args.labels}: no label for id {missing[0]!r}")
    labels = np.array([int(lab[i]) for i in ds.ids])
    profs = profile(ds, labels, args.trend_threshold)
    return [_write(args.out_dir, "profile.csv", profile_csv(profs))]


def cmd_outlier_split(args):
    ds = ingest_csv(args.input)
    if ds.dropped:
        print(f"dropped {len(ds.dropped)} all-zero rows", file=sys.stderr)
    reg, high, log = outlier_split(
        ds, args.alpha, args.p, args.weights, args.stop_ratio, args.max_fraction, args.linkage
    )
    print(f"regular {len(reg)}, high usage {len(high)}", file=sys.stderr)
    return [
        _write(args.out_dir, "regular.csv", reg.to_csv()),
        _write(args.out_dir, "high_usage.csv", high.to_csv()),
        _write(args.out_dir, "outlier_log.json", json.dumps({"dropped": ds.dropped, "iterations": log}, indent=1) + "\n"),
    ]


def cmd_bench(args):
    res = run_benchmark(
        args.presets, args.seeds, args.seed, args.methods, args.alpha, args.p,
        linkage=args.linkage, elbows=args.elbows, n_jobs=args.n_jobs,
    )
    out = [
        _write(args.out_dir, "bench.csv", res.summary_csv()),
        _write(args.out_dir, "bench_runs.csv", res.runs_csv()),
        _write(args.out_dir, "accuracy_matrix.csv", res.matrix_csv()),
    ]
    if args.elbows:
        out.append(_write(args.out_dir, "elbows.csv", res.elbows_csv()))
    if args.sensitivity:
        sensitivity_grid(args.presets, args.sensitivity_seeds, args.seed, linkage=args.linkage,
                         n_jobs=args.n_jobs, result=res)
        out.append(_write(args.out_dir, "sensitivity.csv", res.sensitivity_csv()))
    return out


COMMANDS = {
    "gen": cmd_gen,
    "dist": cmd_dist,
    "cluster": cmd_cluster,
    "elbow": cmd_elbow,
    "eval": cmd_eval,
    "profile": cmd_profile,
    "outlier-split": cmd_outlier_split,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    try:
        args = _parse(argv)
    except (ValueError, OSError) as exc:
        print(f"rdpc: error: {exc}", file=sys.stderr)
        return 2
    try:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        for path in COMMANDS[args.command](args):
            print(path)
    except DegenerateInputError as exc:
        print(f"rdpc: degenerate input: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"rdpc: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
