"""Batch command line: ``balanceclust <command> [flags]``.

Exit status is 0 on success, 1 on a usage error and 2 on a data or
validation error. Errors go to stderr as ``error:<kind>: <message>``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import types
from pathlib import Path

import numpy as np

from . import datasets
from .errors import BalanceClustError
from .global_merge import derive_global_params, deserialize_global, merge, serialize_global
from .harness import PipelineConfig, load_config, partition, run_pipeline, write_regenerated_csv, write_run
from .local_model import LocalParams, build_local_model, deserialize, serialize
from .metrics import evaluate_pipeline
from .regenerate import DEFAULT_MAX_ATTEMPTS_FACTOR, regenerate_all
from .svg import render_svg

OUT_ENV = "BALANCECLUST_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _out_dir(value):
    if value:
        return Path(value)
    if os.environ.get(OUT_ENV):
        return Path(os.environ[OUT_ENV])
    raise UsageError(f"--out is required (or set {OUT_ENV})")


def _read_points(path, labels=False):
    return datasets.load_csv(path, labels=labels)


def _nu(args):
    if args.nu_degrees is not None:
        return math.radians(args.nu_degrees)
    return args.nu


def cmd_generate(args):
    pts, labels = datasets.generate(datasets.preset(args.preset, args.seed))
    datasets.save_csv(pts, args.out, labels=labels, header=args.header)


def cmd_partition(args):
    pts = _read_points(args.input)
    out = _out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, p in enumerate(partition(pts, args.k, args.seed)):
        datasets.save_csv(p, out / f"part{i}.csv")


def cmd_local(args):
    pts = _read_points(args.input, labels=args.labels)
    if args.labels:
        pts = pts[0]
    params = LocalParams(args.eps, args.min_pts, eps_b=args.eps_b, nu=_nu(args),
                         predicate=args.predicate, rho=args.rho, rho_mode=args.rho_mode)
    Path(args.out).write_bytes(serialize(build_local_model(pts, params, args.node_id)))


def cmd_merge(args):
    models = [deserialize(Path(p).read_bytes()) for p in args.models]
    gparams = derive_global_params(models, g_nu=args.g_nu, g_eps=args.g_eps)
    g = merge(models, gparams, recompute_balances=args.recompute_balances)
    Path(args.out).write_bytes(serialize_global(g))


def cmd_regen(args):
    g = deserialize_global(Path(args.global_model).read_bytes())
    regen = regenerate_all(g, args.seed, max_attempts_factor=args.max_attempts_factor)
    write_regenerated_csv(regen, args.out)
    failed = [r for r in regen if r.error]
    for r in failed:
        print(f"warning: global cluster {r.global_id}: {r.error}", file=sys.stderr)


def _dataset_from(doc, base: Path):
    ds = doc.get("dataset") or {}
    if "preset" in ds:
        return datasets.generate(datasets.preset(ds["preset"], ds.get("seed")))
    if "csv" in ds:
        path = Path(ds["csv"])
        if not path.is_absolute():
            path = base / path
        if ds.get("labels"):
            return datasets.load_csv(path, header=ds.get("header", False), labels=True)
        pts = datasets.load_csv(path, header=ds.get("header", False))
        return pts, np.zeros(len(pts), dtype=np.int64)
    raise BalanceClustError("configuration needs a dataset (preset or csv) or --in")


def cmd_pipeline(args):
    config, doc = load_config(args.config)
    if args.input:
        pts, labels = datasets.load_csv(args.input, labels=args.labels), None
        if args.labels:
            pts, labels = pts
    else:
        pts, labels = _dataset_from(doc, Path(args.config).parent)
    out = _out_dir(args.out)
    report = run_pipeline(pts, config)
    write_run(report, out)
    datasets.save_csv(pts, out / "data.csv", labels=labels)
    parts = partition(pts, config.node_count, config.partition_seed)
    (out / "data.svg").write_text(render_svg(pts, labels, title="input"))
    for m, p in zip(report.local_models, parts):
        bsets = [c.boundary for c in m.clusters]
        (out / f"node{m.node_id}.svg").write_text(render_svg(p, boundaries=bsets, title=f"node {m.node_id}"))
    gb = [c.boundary for c in report.final_global.clusters]
    (out / "global.svg").write_text(render_svg(boundaries=gb, draw_balance=True, title="merged boundaries"))
    (out / "regenerated.svg").write_text(
        render_svg(boundaries=gb, regenerated=[r.points for r in report.regenerated], title="regenerated"))
    if labels is not None:
        (out / "quality.json").write_text(evaluate_pipeline(report, pts, labels).to_json())


def cmd_eval(args):
    run = Path(args.run)
    manifest = json.loads((run / "manifest.json").read_text())
    models = [deserialize((run / f"node{n['node_id']}.model").read_bytes()) for n in manifest["nodes"]]
    regen_pts, regen_lab = datasets.load_csv(run / "regenerated.csv", labels=True)
    g = deserialize_global((run / "global.model").read_bytes())
    regenerated = [types.SimpleNamespace(global_id=c.global_id, points=regen_pts[regen_lab == c.global_id])
                   for c in g.clusters]
    report = types.SimpleNamespace(
        final_global=g, local_models=models, regenerated=regenerated,
        bytes_sent=[n["bytes_sent"] for n in manifest["nodes"]],
        raw_partition_bytes=[n["raw_partition_bytes"] for n in manifest["nodes"]],
    )
    pts, labels = datasets.load_csv(args.input, header=args.header, labels=True)
    q = evaluate_pipeline(report, pts, labels)
    text = (q.csv_header() + q.csv_row()) if args.csv else q.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_plot(args):
    pts, labels = None, None
    if args.input:
        if args.labels:
            pts, labels = datasets.load_csv(args.input, labels=True)
        else:
            pts = datasets.load_csv(args.input)
    boundaries = []
    for path in args.boundary or []:
        data = Path(path).read_bytes()
        if b'"kind":"global"' in data:
            boundaries += [c.boundary for c in deserialize_global(data).clusters]
        else:
            boundaries += [c.boundary for c in deserialize(data).clusters]
    regenerated = []
    if args.regenerated:
        rp, rl = datasets.load_csv(args.regenerated, labels=True)
        regenerated = [rp[rl == k] for k in np.unique(rl)]
    Path(args.out).write_text(render_svg(pts, labels, boundaries, regenerated, draw_balance=args.balance))


def _local_flags(p):
    p.add_argument("--eps", type=float, required=True, help="DBSCAN neighbourhood radius")
    p.add_argument("--min-pts", type=int, required=True, help="DBSCAN density threshold (self included)")
    p.add_argument("--eps-b", type=float, default=None, help="balance-vector radius (default: --eps)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--nu", type=float, default=math.pi / 6,
                   help="cone half-aperture in radians (default pi/6, the value reported to work best "
                        "on 2-D and 3-D data)")
    g.add_argument("--nu-degrees", type=float, default=None, help="cone half-aperture in degrees")
    p.add_argument("--predicate", choices=["cone", "sphere"], default="cone")
    p.add_argument("--rho", type=float, default=None, help="sphere offset (default: automatic)")
    p.add_argument("--rho-mode", choices=["global", "per_point"], default="global")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="balanceclust", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("generate", help="write a synthetic preset dataset as CSV (last column = label)")
    p.add_argument("--preset", required=True, choices=sorted(datasets.PRESETS))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("partition", help="split a CSV into k random equal parts")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("local", help="build one node's local model document")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labels", action="store_true", help="input CSV carries a trailing label column")
    p.add_argument("--node-id", type=int, default=0)
    _local_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("merge", help="merge local model documents into a global model")
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--g-nu", type=float, default=None)
    p.add_argument("--g-eps", type=float, default=None)
    p.add_argument("--recompute-balances", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("regen", help="regenerate global clusters by random throw")
    p.add_argument("--global", dest="global_model", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts-factor", type=int, default=DEFAULT_MAX_ATTEMPTS_FACTOR)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_regen)

    p = sub.add_parser("pipeline", help="run the whole distributed simulation from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--in", dest="input", help="dataset CSV (overrides the config's dataset)")
    p.add_argument("--labels", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("eval", help="score a pipeline output directory against labelled data")
    p.add_argument("--run", required=True)
    p.add_argument("--in", dest="input", required=True, help="original CSV with label column")
    p.add_argument("--header", action="store_true")
    p.add_argument("--csv", action="store_true", help="emit a CSV header + row instead of JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="render points / boundaries / regenerated points as SVG")
    p.add_argument("--in", dest="input")
    p.add_argument("--labels", action="store_true")
    p.add_argument("--boundary", nargs="*", help="local or global model documents")
    p.add_argument("--regenerated")
    p.add_argument("--balance", action="store_true", help="draw balance vectors")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(f"error:usage: {exc}", file=sys.stderr)
        return 1
    except (BalanceClustError, OSError, ValueError, KeyError) as exc:
        print(f"error:data: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
