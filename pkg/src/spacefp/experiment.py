"""Synthetic robustness experiments: presence fingerprints (SP) versus density (DB).

Each instance of a virtual space is one epoch; it is vectorized both ways and
the two sets of vectors are clustered with k = number of spaces, SP under
MPD and DB under Euclidean distance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .cluster import ClusterConfig, EvalReport, evaluate, kmeans
from .metric import MetricKind
from .synth import PerturbationConfig, SynthConfig, generate_instances, generate_spaces
from .vectorize import both_vectors

log = logging.getLogger(__name__)

SWEEPABLE = ("alpha_ts", "alpha_td", "alpha_gs", "beta", "gamma", "eta", "rho")


@dataclass(frozen=True)
class RunResult:
    sp: EvalReport
    db: EvalReport
    sp_assignments: tuple[int, ...]
    db_assignments: tuple[int, ...]
    instance_ids: tuple[str, ...]
    truth: tuple[str, ...]


def clustering_run(cfg: SynthConfig, p: PerturbationConfig, restarts: int = 10,
                   sp_metric=MetricKind.MPD, db_metric=MetricKind.EUCLIDEAN) -> RunResult:
    spaces = generate_spaces(cfg)
    sp_vecs, db_vecs, ids, truth = [], [], [], []
    for inst in generate_instances(spaces, cfg.ni, p):
        sp, db = both_vectors(inst.detections, cfg.fd, cfg.fr)
        sp_vecs.append(sp)
        db_vecs.append(db)
        ids.append(inst.instance_id)
        truth.append(inst.space)
    k = len(spaces)
    sp_res = kmeans(sp_vecs, ClusterConfig(k, sp_metric, restarts=restarts, seed=p.seed))
    db_res = kmeans(db_vecs, ClusterConfig(k, db_metric, restarts=restarts, seed=p.seed))
    return RunResult(evaluate(sp_res.assignments, truth), evaluate(db_res.assignments, truth),
                     sp_res.assignments, db_res.assignments, tuple(ids), tuple(truth))


def sweep(cfg: SynthConfig, param: str, values, seeds, base: PerturbationConfig | None = None,
          restarts: int = 10) -> list[dict]:
    """One row per (value, seed). Each seed drives both space generation and noise."""
    if param not in SWEEPABLE:
        raise ValueError(f"unknown sensitivity parameter {param!r}")
    base = base or PerturbationConfig()
    rows = []
    for value in values:
        for seed in seeds:
            run = clustering_run(replace(cfg, seed=seed),
                                 replace(base, **{param: float(value)}, seed=seed), restarts)
            log.info("%s=%s seed=%s SP=%.3f DB=%.3f", param, value, seed,
                     run.sp.accuracy, run.db.accuracy)
            rows.append({"param": param, "value": float(value), "seed": int(seed),
                         **{f"sp_{k}": v for k, v in run.sp.to_dict().items()},
                         **{f"db_{k}": v for k, v in run.db.to_dict().items()}})
    return rows


def summarize(rows: list[dict], metric: str = "accuracy") -> list[dict]:
    """Mean SP/DB score per (param, value), in first-seen order."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["param"], row["value"]), []).append(row)
    return [{"param": p, "value": v, "n": len(g),
             "sp_mean": float(np.mean([r[f"sp_{metric}"] for r in g])),
             "db_mean": float(np.mean([r[f"db_{metric}"] for r in g]))}
            for (p, v), g in groups.items()]
