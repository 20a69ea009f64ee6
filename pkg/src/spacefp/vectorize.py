"""Presence-feature vectors and the hourly-density baseline.

For every window ``W = <t_start, tau>`` on the ``fr`` grid of an epoch of
length ``fd`` and every sampling period ``T_s`` dividing ``tau``, the presence
feature counts the devices seen in *each* of the ``tau / T_s`` consecutive
``T_s``-buckets of ``W``. The vector is those counts divided by their maximum.

:func:`vectorize` gets there with one running intersection per
``(t_start, T_s)`` pair over device bitsets, so cost is cubic in ``fd / fr``.
:func:`vectorize_naive` is the literal quadruple-cost loop and exists as a
test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParameters
from .model import (
    DetectionSet,
    FeatureVector,
    Window,
    check_params,
    density_layout,
    feature_layout,
    grid_triples,
)


@dataclass(frozen=True)
class BucketList:
    """Device-id sets for consecutive ``period``-long intervals starting at ``origin``."""

    buckets: tuple[frozenset, ...]
    period: int
    origin: int

    def intersection(self) -> frozenset:
        if not self.buckets:
            return frozenset()
        return frozenset.intersection(*self.buckets)


def bucket_list(dt: DetectionSet, window: Window, period: int) -> BucketList:
    """Bucket the records of ``dt`` inside ``window`` by ``period``."""
    return _bucket_pairs([(r.device_id, r.timestamp) for r in dt], window, period)


def _bucket_pairs(pairs, window: Window, period: int) -> BucketList:
    if window.tau % period:
        raise InvalidParameters(f"tau={window.tau} is not a multiple of T_s={period}")
    sets = [set() for _ in range(window.tau // period)]
    lo, hi = window.t_start, window.t_start + window.tau
    for device, t in pairs:
        if lo <= t < hi:
            sets[(t - lo) // period].add(device)
    return BucketList(tuple(frozenset(s) for s in sets), period, lo)


def _check_epoch(dt_bar: DetectionSet, fd: int, fr: int) -> int:
    R = check_params(fd, fr)
    if len(dt_bar) and int(dt_bar.timestamp.max()) >= fd:
        raise InvalidParameters(
            f"record at t={int(dt_bar.timestamp.max())} lies outside the epoch [0, {fd})")
    return R


def _normalized(raw: np.ndarray) -> np.ndarray:
    raw = raw.astype(np.float64)
    top = raw.max() if len(raw) else 0.0
    if top == 0:
        return np.zeros_like(raw)
    return raw / top


def presence_matrix(dt_bar: DetectionSet, fd: int, fr: int) -> np.ndarray:
    """Boolean ``(fd // fr, n_devices)`` matrix of device presence per base interval.

    Columns are the distinct devices occurring in ``dt_bar`` (in code order).
    """
    R = _check_epoch(dt_bar, fd, fr)
    if not len(dt_bar):
        return np.zeros((R, 0), dtype=bool)
    dev = dt_bar.device
    if len(dt_bar.device_ids) > len(dev):
        _, dev = np.unique(dev, return_inverse=True)
        n_dev = int(dev.max()) + 1
    else:
        n_dev = len(dt_bar.device_ids)
    P = np.zeros((R, n_dev), dtype=bool)
    P[dt_bar.timestamp // fr, dev] = True
    return P


@lru_cache(maxsize=64)
def _scan_plan(R: int):
    """For each (T_s, t_start) in grid units, the output positions for tau = T_s, 2 T_s, ..."""
    where = {triple: i for i, triple in enumerate(grid_triples(R))}
    plan = []
    for k in range(1, R + 1):
        for s in range(R - k + 1):
            plan.append((k, s, tuple(where[(s, m * k, k)] for m in range(1, (R - s) // k + 1))))
    return plan


def raw_presence_counts(dt_bar: DetectionSet, fd: int, fr: int) -> np.ndarray:
    """Un-normalized presence features in canonical layout order."""
    return counts_from_presence(presence_matrix(dt_bar, fd, fr))


def counts_from_presence(P: np.ndarray) -> np.ndarray:
    """Presence features from a ``(R, n_devices)`` presence matrix (grid units)."""
    R = P.shape[0]
    packed = np.packbits(P, axis=1, bitorder="little")
    base = [int.from_bytes(row.tobytes(), "little") for row in packed]

    raw = [0] * len(grid_triples(R))
    # spans[s] is the union of base intervals s .. s+k-1 for the current k
    spans = list(base)
    k_prev = 1
    for k, s, positions in _scan_plan(R):
        if k != k_prev:
            spans = [spans[j] | base[j + k - 1] for j in range(R - k + 1)]
            k_prev = k
        acc = -1
        j = s
        for p in positions:
            acc &= spans[j]
            raw[p] = acc.bit_count()
            j += k
    return np.asarray(raw, dtype=np.int64)


def vectorize(dt_bar: DetectionSet, fd: int, fr: int) -> FeatureVector:
    """Presence-feature vector of one time-normalized epoch.

    Records must satisfy ``0 <= t < fd``; anything later raises
    :class:`InvalidParameters` rather than being dropped. An epoch without
    detections yields the all-zero vector.
    """
    raw = raw_presence_counts(dt_bar, fd, fr)
    return FeatureVector(_normalized(raw), feature_layout(fd, fr), fd, fr)


def vectorize_naive(dt_bar: DetectionSet, fd: int, fr: int) -> FeatureVector:
    _check_epoch(dt_bar, fd, fr)
    pairs = [(r.device_id, r.timestamp) for r in dt_bar]
    raw = []
    for t_start in range(0, fd, fr):
        for tau in range(fr, fd - t_start + 1, fr):
            for ts in range(fr, tau + 1, fr):
                if tau % ts == 0:
                    buckets = _bucket_pairs(pairs, Window(t_start, tau), ts)
                    raw.append(len(buckets.intersection()))
    return FeatureVector(_normalized(np.asarray(raw, dtype=np.int64)),
                         feature_layout(fd, fr), fd, fr)


def density_vector(dt_bar: DetectionSet, fd: int, fr: int) -> FeatureVector:
    """Distinct devices per ``fr``-long interval, max-normalized."""
    raw = presence_matrix(dt_bar, fd, fr).sum(axis=1)
    return FeatureVector(_normalized(raw), density_layout(fd, fr), fd, fr)


def both_vectors(dt_bar: DetectionSet, fd: int, fr: int) -> tuple[FeatureVector, FeatureVector]:
    """``(vectorize(...), density_vector(...))`` sharing one presence matrix."""
    P = presence_matrix(dt_bar, fd, fr)
    return (FeatureVector(_normalized(counts_from_presence(P)), feature_layout(fd, fr), fd, fr),
            FeatureVector(_normalized(P.sum(axis=1)), density_layout(fd, fr), fd, fr))
