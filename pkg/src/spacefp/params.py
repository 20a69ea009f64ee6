"""Automatic choice of fingerprint duration (FD) and resolution (FR).

Duration: for every candidate ``m = i * r`` the dataset is cut into
consecutive ``m``-long epochs, each vectorized at resolution ``i`` so that all
candidates yield vectors of the same length. The candidate whose epochs are
most alike (lowest mean pairwise distance) wins.

Resolution: with FD fixed, every divisor of FD is tried and the one that
makes consecutive epochs *least* alike wins.

Ties go to the smallest candidate in both phases.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData, InvalidParameters
from .metric import MetricKind, mean_pairwise_distance
from .model import DetectionSet, divisors, feature_count, normalize_time
from .vectorize import vectorize


@dataclass(frozen=True)
class ParamSearchConfig:
    r: int
    metric: MetricKind = MetricKind.MPD
    # ceiling on candidate durations as a fraction of dur(DT); 0.5 keeps >= 2 epochs
    max_duration_fraction: float = 0.5

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise InvalidParameters(f"r must be a positive integer, got {self.r}")
        if not 0 < self.max_duration_fraction <= 0.5:
            raise InvalidParameters("max_duration_fraction must lie in (0, 0.5]")
        object.__setattr__(self, "metric", MetricKind.parse(self.metric))


@dataclass(frozen=True)
class SearchTrace:
    """Score per candidate for one search phase.

    ``candidates`` are parameter values in time units (durations for the
    ``"duration"`` phase, resolutions for ``"resolution"``).
    """

    phase: str
    candidates: tuple[int, ...]
    scores: tuple[float, ...]
    epochs: tuple[int, ...] = field(default=())

    def best(self) -> int:
        pick = min if self.phase == "duration" else max
        target = pick(self.scores)
        return self.candidates[self.scores.index(target)]

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.candidates, self.scores))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["candidate", "score"])
            for c, s in zip(self.candidates, self.scores):
                w.writerow([c, repr(float(s))])


def slice_epochs(dt_bar: DetectionSet, length: int, count: int | None = None) -> list[DetectionSet]:
    """Consecutive ``length``-long epochs ``[j*length, (j+1)*length)``, each re-based to 0.

    An integer timestamp ``t`` occupies the unit interval ``[t, t+1)``, so the
    observed span is ``dur + 1`` units and by default ``(dur + 1) // length``
    complete epochs are returned; a trailing partial epoch is dropped.
    """
    if length < 1:
        raise InvalidParameters("epoch length must be positive")
    if count is None:
        count = (dt_bar.dur + 1) // length if len(dt_bar) else 0
    if count == 0:
        return []
    idx = dt_bar.timestamp // length
    order = np.argsort(idx, kind="stable")
    bounds = np.searchsorted(idx[order], np.arange(count + 1))
    out = []
    for j in range(count):
        sel = order[bounds[j]:bounds[j + 1]]
        out.append(dt_bar.select(sel).shifted(-j * length))
    return out


def _score(epochs, fd, fr, metric) -> float:
    return mean_pairwise_distance([vectorize(e, fd, fr) for e in epochs], metric)


def find_duration(dt_bar: DetectionSet, cfg: ParamSearchConfig) -> tuple[int, SearchTrace]:
    if not len(dt_bar):
        raise InsufficientData("no detections")
    dt_bar = normalize_time(dt_bar)
    r, dur = cfg.r, dt_bar.dur
    if dur < 4 * r:
        raise InsufficientData(f"dur={dur} is shorter than 4r={4 * r}")
    n_expected = feature_count(r, 1)
    top = int(dur * cfg.max_duration_fraction) // r
    cands, scores, counts = [], [], []
    for i in range(1, top + 1):
        m = i * r
        epochs = slice_epochs(dt_bar, m)
        vectors = [vectorize(e, m, i) for e in epochs]
        assert all(len(v) == n_expected for v in vectors)
        cands.append(m)
        scores.append(mean_pairwise_distance(vectors, cfg.metric))
        counts.append(len(epochs))
    trace = SearchTrace("duration", tuple(cands), tuple(scores), tuple(counts))
    return trace.best(), trace


def find_resolution(dt_bar: DetectionSet, fd: int, cfg: ParamSearchConfig) -> tuple[int, SearchTrace]:
    if not len(dt_bar):
        raise InsufficientData("no detections")
    dt_bar = normalize_time(dt_bar)
    epochs = slice_epochs(dt_bar, fd)
    if len(epochs) < 2:
        raise InsufficientData(f"need at least two complete epochs of {fd}, have {len(epochs)}")
    cands, scores = [], []
    for i in divisors(fd):
        cands.append(i)
        scores.append(_score(epochs, fd, i, cfg.metric))
    trace = SearchTrace("resolution", tuple(cands), tuple(scores), (len(epochs),) * len(cands))
    return trace.best(), trace


def fingerprint_parameters(dt_bar: DetectionSet, cfg: ParamSearchConfig):
    """Run both phases; returns ``(fd, fr, (duration_trace, resolution_trace))``."""
    fd, t1 = find_duration(dt_bar, cfg)
    fr, t2 = find_resolution(dt_bar, fd, cfg)
    return fd, fr, (t1, t2)
