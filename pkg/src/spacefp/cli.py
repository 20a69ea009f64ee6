"""Command-line entry point: ``spacefp <command> [options]``.

Every command writes its artifacts into ``--out`` together with a
``manifest.json`` describing the run. Log level comes from
``SPACEFP_LOG_LEVEL`` (default WARNING).
"""

from __future__ import annotations

import argparse
import logging
import os
import platform
import re
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .cluster import ClusterConfig, evaluate, kmeans, mds_2d
from .errors import (
    IncomparableVectors,
    InsufficientData,
    InvalidConfig,
    InvalidInput,
    InvalidParameters,
    ParseError,
    SpaceFPError,
)
from .experiment import SWEEPABLE, summarize, sweep
from .io import (
    ingest_csv,
    read_truth_csv,
    write_assignments_csv,
    write_coords_csv,
    write_detections_csv,
    write_json,
    write_rows,
    write_truth_csv,
    write_vectors_csv,
)
from .metric import MetricKind, pairwise_distance_matrix, write_matrix_csv
from .model import DetectionSet, check_params, normalize_time, restrict_to_space
from .params import ParamSearchConfig, fingerprint_parameters, slice_epochs
from .pipeline import drop_days, save_fingerprint, spaceprint
from .synth import PerturbationConfig, SynthConfig, generate_instances, generate_spaces
from .vectorize import density_vector, vectorize

log = logging.getLogger("spacefp")

EXIT_CODES = [
    (ParseError, 2),
    (InsufficientData, 3),
    ((InvalidParameters, InvalidConfig, InvalidInput, IncomparableVectors), 4),
    (SpaceFPError, 1),
]


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------- data access

def _load(args) -> DetectionSet:
    return ingest_csv(args.input, time_unit=args.time_unit)


def _spaces(dt: DetectionSet, args) -> list[str]:
    spaces = dt.space_list()
    if getattr(args, "space", None):
        if args.space not in spaces:
            raise InsufficientData(f"space {args.space!r} not present in {args.input}")
        return [args.space]
    return spaces


def _stream(dt: DetectionSet, space: str, args) -> DetectionSet:
    """Restricted, zero-based, optionally day-filtered records of one space."""
    sub = normalize_time(restrict_to_space(dt, space))
    if args.weekday_filter:
        sub = drop_days(sub, _int_list(args.weekday_filter), args.day_length, args.cycle_days)
    return sub


def _points(dt: DetectionSet, args, method: str):
    """``(point_ids, labels, vectors)`` for clustering and MDS.

    ``instance`` points: every space id is one epoch already on ``[0, fd)``
    (synthetic instances), labeled through ``--truth`` when given.
    ``epoch`` points: every complete epoch of every space, labeled by space.
    """
    fn = density_vector if method == "db" else vectorize
    truth = read_truth_csv(args.truth) if getattr(args, "truth", None) else None
    ids, labels, vecs = [], [], []
    for space in _spaces(dt, args):
        if args.points == "instance":
            vecs.append(fn(restrict_to_space(dt, space), args.fd, args.fr))
            ids.append(space)
            labels.append(truth.get(space, "") if truth else space)
        else:
            for j, epoch in enumerate(slice_epochs(_stream(dt, space, args), args.fd)):
                vecs.append(fn(epoch, args.fd, args.fr))
                ids.append(f"{space}#{j}")
                labels.append(truth.get(space, space) if truth else space)
    if not vecs:
        raise InsufficientData("no points to process")
    return ids, labels, vecs


def _metric(args, method: str) -> MetricKind:
    if args.metric:
        return MetricKind.parse(args.metric)
    return MetricKind.EUCLIDEAN if method == "db" else MetricKind.MPD


# ---------------------------------------------------------------- commands

def cmd_params(args, out: Path) -> dict:
    from .plotting import plot_trace

    dt = _load(args)
    cfg = ParamSearchConfig(args.ratio, MetricKind.parse(args.metric or "mpd"))
    results = {}
    for space in _spaces(dt, args):
        fd, fr, (t1, t2) = fingerprint_parameters(_stream(dt, space, args), cfg)
        tag = _safe(space)
        t1.to_csv(out / f"duration_trace_{tag}.csv")
        t2.to_csv(out / f"resolution_trace_{tag}.csv")
        plot_trace(t1, out / f"duration_trace_{tag}.svg", "fingerprint duration")
        plot_trace(t2, out / f"resolution_trace_{tag}.svg", "fingerprint resolution")
        results[space] = {"fd": fd, "fr": fr}
        print(f"{space}\tfd={fd}\tfr={fr}")
    write_json(out / "params.json", results)
    return results


def cmd_fingerprint(args, out: Path) -> dict:
    dt = _load(args)
    override = None
    if args.fd is not None or args.fr is not None:
        if args.fd is None or args.fr is None:
            raise InvalidParameters("--fd and --fr must be given together")
        override = (args.fd, args.fr)
    elif args.ratio is None:
        raise InvalidParameters("give either --ratio or both --fd and --fr")
    cfg = ParamSearchConfig(args.ratio, MetricKind.parse(args.metric or "mpd")) if args.ratio else None
    results = {}
    for space in _spaces(dt, args):
        sub = _stream(dt, space, args)
        fp = spaceprint(sub, space, cfg, override)
        save_fingerprint(fp, out / f"fingerprint_{_safe(space)}.json")
        results[space] = {"fd": fp.fd, "fr": fp.fr, "n": len(fp.vector)}
        print(f"{space}\tfd={fp.fd}\tfr={fp.fr}\tn={len(fp.vector)}")
    return results


def _epoch_table(args, out: Path, method: str, filename: str) -> dict:
    check_params(args.fd, args.fr)
    dt = _load(args)
    fn = density_vector if method == "db" else vectorize
    keys, vecs = [], []
    for space in _spaces(dt, args):
        for j, epoch in enumerate(slice_epochs(_stream(dt, space, args), args.fd)):
            keys.append((space, j))
            vecs.append(fn(epoch, args.fd, args.fr))
    if not vecs:
        raise InsufficientData(f"no complete epoch of length {args.fd}")
    write_vectors_csv(out / filename, keys, ["space_id", "epoch"], vecs)
    return {"epochs": len(vecs), "features": len(vecs[0])}


def cmd_vectorize(args, out: Path) -> dict:
    return _epoch_table(args, out, "sp", "epoch_vectors.csv")


def cmd_baseline(args, out: Path) -> dict:
    return _epoch_table(args, out, "db", "density_vectors.csv")


def _synth_cfgs(args):
    cfg = SynthConfig(ns=args.ns, ni=args.ni, fd=args.fd, fr=args.fr,
                      ng_range=(args.ng_min, args.ng_max), np_range=(args.np_min, args.np_max),
                      detection_period=args.detection_period, seed=args.seed)
    p = PerturbationConfig(alpha_ts=args.alpha_ts, alpha_td=args.alpha_td, alpha_gs=args.alpha_gs,
                           beta=args.beta, gamma=args.gamma, eta=args.eta, rho=args.rho,
                           seed=args.seed)
    return cfg, p


def cmd_synth(args, out: Path) -> dict:
    cfg, p = _synth_cfgs(args)
    spaces = generate_spaces(cfg)
    truth = []

    def sets():
        for inst in generate_instances(spaces, cfg.ni, p):
            truth.append((inst.instance_id, inst.space))
            yield inst.detections.compact(cfg.fr) if args.compact else inst.detections

    n = write_detections_csv(out / "detections.csv", sets())
    write_truth_csv(out / "truth.csv", truth)
    print(f"{len(truth)} instances, {n} detections")
    return {"instances": len(truth), "detections": n}


def cmd_cluster(args, out: Path) -> dict:
    check_params(args.fd, args.fr)
    dt = _load(args)
    ids, labels, vecs = _points(dt, args, args.method)
    k = args.k or len(set(labels))
    res = kmeans(vecs, ClusterConfig(k, _metric(args, args.method), args.max_iters,
                                     args.restarts, args.seed))
    write_assignments_csv(out / "assignments.csv", ids, res.assignments)
    report = evaluate(res.assignments, labels, args.mapping).to_dict()
    report.update({"k": k, "points": len(ids), "inertia": res.inertia})
    write_json(out / "report.json", report)
    print(" ".join(f"{key}={report[key]:.4f}" for key in ("accuracy", "rand_index", "f_measure", "nmi")))
    return report


def cmd_mds(args, out: Path) -> dict:
    from .plotting import plot_mds

    check_params(args.fd, args.fr)
    dt = _load(args)
    ids, labels, vecs = _points(dt, args, args.method)
    D = pairwise_distance_matrix(vecs, _metric(args, args.method))
    Y = mds_2d(D)
    write_matrix_csv(out / "dissimilarity.csv", D)
    write_coords_csv(out / "coords.csv", ids, Y, labels)
    plot_mds(Y, labels, out / "mds.svg")
    return {"points": len(ids), "labels": len(set(labels))}


def cmd_sweep(args, out: Path) -> dict:
    from .plotting import plot_sweep

    cfg, p = _synth_cfgs(args)
    seeds = _int_list(args.seeds)
    rows = sweep(cfg, args.param, _float_list(args.values), seeds, replace(p, **{args.param: 0.0}),
                 restarts=args.restarts)
    keys = list(rows[0])
    write_rows(out / "sweep.csv", keys, ([r[k] for k in keys] for r in rows))
    summary = summarize(rows)
    write_rows(out / "sweep_summary.csv", list(summary[0]), ([r[k] for k in r] for r in summary))
    plot_sweep(summary, out / f"sweep_{args.param}.svg", args.param)
    for r in summary:
        print(f"{r['param']}={r['value']:g}\tSP={r['sp_mean']:.3f}\tDB={r['db_mean']:.3f}")
    return {"summary": summary}


# ---------------------------------------------------------------- parser

def _add_common(p, data=True):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    if data:
        p.add_argument("--input", required=True, help="detection CSV")
        p.add_argument("--space", help="restrict to one space id")
        p.add_argument("--time-unit", default="unit")
        p.add_argument("--weekday-filter", metavar="DAYS",
                       help="comma-separated day indices (within a cycle) to drop, e.g. 5,6")
        p.add_argument("--day-length", type=int, default=24, help="time units per day")
        p.add_argument("--cycle-days", type=int, default=7, help="days per cycle")


def _add_metric(p):
    p.add_argument("--metric", choices=[m.value for m in MetricKind])


def _add_fdfr(p, required=True):
    p.add_argument("--fd", type=int, required=required)
    p.add_argument("--fr", type=int, required=required)


def _add_points(p):
    p.add_argument("--method", choices=["sp", "db"], default="sp",
                   help="presence features (sp) or density baseline (db)")
    p.add_argument("--points", choices=["instance", "epoch"], default="instance")
    p.add_argument("--truth", help="instance_id,space_id ground-truth CSV")


def _add_synth(p):
    p.add_argument("--ns", type=int, default=10)
    p.add_argument("--ni", type=int, default=100)
    p.add_argument("--fd", type=int, default=1440)
    p.add_argument("--fr", type=int, default=60)
    p.add_argument("--ng-min", type=int, default=1)
    p.add_argument("--ng-max", type=int, default=100)
    p.add_argument("--np-min", type=int, default=1)
    p.add_argument("--np-max", type=int, default=100)
    p.add_argument("--detection-period", type=int, default=1)
    for name in SWEEPABLE:
        p.add_argument("--" + name.replace("_", "-"), type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spacefp", description="Presence-pattern fingerprints of spaces from detection logs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="search fingerprint duration and resolution")
    _add_common(p)
    _add_metric(p)
    p.add_argument("--ratio", type=int, required=True, help="r such that fd = r * fr")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("fingerprint", help="average per-epoch vectors into fingerprints")
    _add_common(p)
    _add_metric(p)
    _add_fdfr(p, required=False)
    p.add_argument("--ratio", type=int)
    p.set_defaults(func=cmd_fingerprint)

    for name, func, what in (("vectorize", cmd_vectorize, "presence-feature"),
                             ("baseline", cmd_baseline, "density")):
        p = sub.add_parser(name, help=f"per-epoch {what} vectors as CSV")
        _add_common(p)
        _add_fdfr(p)
        p.set_defaults(func=func)

    p = sub.add_parser("synth", help="generate synthetic instances and ground truth")
    _add_common(p, data=False)
    _add_synth(p)
    p.add_argument("--compact", action="store_true",
                   help="keep one record per device per fr interval")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cluster", help="k-means on per-instance or per-epoch vectors")
    _add_common(p)
    _add_metric(p)
    _add_fdfr(p)
    _add_points(p)
    p.add_argument("--k", type=int, help="number of clusters (default: number of labels)")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--mapping", choices=["hungarian", "majority"], default="hungarian")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("mds", help="2D classical MDS of vectors, CSV plus SVG")
    _add_common(p)
    _add_metric(p)
    _add_fdfr(p)
    _add_points(p)
    p.set_defaults(func=cmd_mds)

    p = sub.add_parser("sweep", help="SP vs DB accuracy while varying one noise parameter")
    _add_common(p, data=False)
    _add_synth(p)
    p.add_argument("--param", choices=SWEEPABLE, required=True)
    p.add_argument("--values", default="0,0.3,0.6,0.9")
    p.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9")
    p.add_argument("--restarts", type=int, default=10)
    p.set_defaults(func=cmd_sweep)
    return parser


def _manifest(args, results) -> dict:
    spec = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    return {
        "command": args.command,
        "args": spec,
        "seed": args.seed,
        "results": results,
        "versions": {
            "spacefp": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SPACEFP_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        results = args.func(args, out)
        write_json(out / "manifest.json", _manifest(args, results))
    except SpaceFPError as exc:
        code = next(c for cls, c in EXIT_CODES if isinstance(exc, cls))
        print(f"spacefp {args.command}: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        print(f"spacefp {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
