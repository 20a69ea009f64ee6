"""K-means with a pluggable metric, partition-agreement scores, and classical MDS."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import IncomparableVectors, InvalidConfig, InvalidInput
from .metric import MetricKind, cross_distances
from .model import FeatureVector


@dataclass(frozen=True)
class ClusterConfig:
    k: int
    metric: MetricKind = MetricKind.MPD
    max_iters: int = 100
    restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.max_iters < 1 or self.restarts < 1:
            raise InvalidConfig("k, max_iters and restarts must be positive")
        object.__setattr__(self, "metric", MetricKind.parse(self.metric))


@dataclass(frozen=True)
class ClusterResult:
    assignments: tuple[int, ...]
    centroids: tuple[FeatureVector, ...]
    inertia: float
    iterations: int
    history: tuple[float, ...] = ()


def _as_matrix(points: Sequence[FeatureVector]) -> np.ndarray:
    for p in points[1:]:
        if not points[0].comparable(p):
            raise IncomparableVectors("all points must share fd, fr and layout")
    return np.stack([p.values for p in points])


def _cost(D: np.ndarray, labels: np.ndarray) -> float:
    # sum of squared distances to the assigned centroid (the k-means objective)
    return float(np.sum(D[np.arange(len(labels)), labels] ** 2))


def _plus_plus(X, k, metric, rng) -> np.ndarray:
    n = len(X)
    centers = [int(rng.integers(n))]
    closest = cross_distances(X, X[centers], metric)[:, 0] ** 2
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        centers.append(idx)
        closest = np.minimum(closest, cross_distances(X, X[[idx]], metric)[:, 0] ** 2)
    return X[centers].copy()


def _lloyd(X, C, metric, max_iters):
    labels = None
    history = []
    it = 0
    for it in range(1, max_iters + 1):
        D = cross_distances(X, C, metric)
        new = np.argmin(D, axis=1)
        history.append(_cost(D, new))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        C = np.stack([X[labels == c].mean(axis=0) if np.any(labels == c) else C[c]
                      for c in range(len(C))])
        empty = [c for c in range(len(C)) if not np.any(labels == c)]
        if empty:
            far = np.argsort(-D[np.arange(len(X)), labels], kind="stable")
            for c, idx in zip(empty, far):
                C[c] = X[idx]
    D = cross_distances(X, C, metric)
    labels = np.argmin(D, axis=1)
    return labels, C, _cost(D, labels), it, history


def kmeans(points: Sequence[FeatureVector], cfg: ClusterConfig) -> ClusterResult:
    """Lloyd iterations under ``cfg.metric`` with mean centroids; best of seeded restarts."""
    points = list(points)
    if cfg.k > len(points):
        raise InvalidConfig(f"k={cfg.k} exceeds the number of points ({len(points)})")
    X = _as_matrix(points)
    rng = np.random.default_rng(cfg.seed)
    best = None
    for _ in range(cfg.restarts):
        C0 = _plus_plus(X, cfg.k, cfg.metric, rng)
        run = _lloyd(X, C0, cfg.metric, cfg.max_iters)
        if best is None or run[2] < best[2]:
            best = run
    labels, C, cost, iters, history = best
    ref = points[0]
    centroids = tuple(FeatureVector(c, ref.layout, ref.fd, ref.fr) for c in C)
    return ClusterResult(tuple(int(x) for x in labels), centroids, cost, iters, tuple(history))


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    rand_index: float
    f_measure: float
    nmi: float

    def to_dict(self) -> dict:
        return asdict(self)


def contingency(pred: Sequence, truth: Sequence) -> np.ndarray:
    if len(pred) != len(truth):
        raise InvalidInput(f"partitions cover {len(pred)} and {len(truth)} points")
    _, pi = np.unique(np.asarray(pred, dtype=object).astype(str), return_inverse=True)
    _, ti = np.unique(np.asarray(truth, dtype=object).astype(str), return_inverse=True)
    M = np.zeros((pi.max() + 1 if len(pi) else 0, ti.max() + 1 if len(ti) else 0), dtype=np.int64)
    np.add.at(M, (pi, ti), 1)
    return M


def clustering_accuracy(pred, truth, mapping: str = "hungarian") -> float:
    """Fraction of points correctly labeled after mapping clusters to labels.

    ``"hungarian"`` uses the best one-to-one mapping; ``"majority"`` maps
    every cluster to its most frequent label.
    """
    M = contingency(pred, truth)
    n = M.sum()
    if n == 0:
        return 1.0
    if mapping == "majority":
        return int(M.max(axis=1).sum()) / int(n)
    rows, cols = linear_sum_assignment(-M)
    return int(M[rows, cols].sum()) / int(n)


def _pairs(x) -> int:
    return int(x) * (int(x) - 1) // 2


def pair_counts(M: np.ndarray) -> tuple[int, int, int, int]:
    """(same-same, same-pred-only, same-truth-only, different-different) pair counts."""
    n = int(M.sum())
    tp = sum(_pairs(x) for x in M.ravel())
    same_pred = sum(_pairs(x) for x in M.sum(axis=1))
    same_truth = sum(_pairs(x) for x in M.sum(axis=0))
    fp, fn = same_pred - tp, same_truth - tp
    return tp, fp, fn, _pairs(n) - tp - fp - fn


def rand_index(pred, truth) -> float:
    tp, fp, fn, tn = pair_counts(contingency(pred, truth))
    total = tp + fp + fn + tn
    return 1.0 if total == 0 else (tp + tn) / total


def f_measure(pred, truth) -> float:
    """Harmonic mean of pairwise precision and recall.

    With no co-clustered pairs on either side the partitions agree (1.0); with
    none on one side only, the missing ratio counts as 0.
    """
    tp, fp, fn, _ = pair_counts(contingency(pred, truth))
    if tp + fp == 0 and tp + fn == 0:
        return 1.0
    if tp == 0:
        return 0.0
    precision, recall = tp / (tp + fp), tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def _entropy(counts, n) -> float:
    return -math.fsum(c / n * math.log(c / n) for c in counts if c > 0)


def nmi(pred, truth) -> float:
    """Mutual information over the arithmetic mean of the two entropies."""
    M = contingency(pred, truth)
    n = int(M.sum())
    if n == 0:
        return 1.0
    a, b = M.sum(axis=1), M.sum(axis=0)
    ha, hb = _entropy(a, n), _entropy(b, n)
    if ha == 0 and hb == 0:
        return 1.0
    mi = math.fsum(
        M[i, j] / n * math.log(n * M[i, j] / (a[i] * b[j]))
        for i, j in zip(*np.nonzero(M))
    )
    return max(0.0, min(1.0, mi / ((ha + hb) / 2)))


def evaluate(pred, truth, mapping: str = "hungarian") -> EvalReport:
    return EvalReport(
        accuracy=clustering_accuracy(pred, truth, mapping),
        rand_index=rand_index(pred, truth),
        f_measure=f_measure(pred, truth),
        nmi=nmi(pred, truth),
    )


def mds_2d(dissimilarity) -> np.ndarray:
    """Classical (Torgerson) scaling of a dissimilarity matrix into the plane.

    Returns an ``(n, 2)`` array centered at the origin. Negative eigenvalues
    are clamped to zero, so a degenerate input collapses to the origin.
    """
    D = np.asarray(dissimilarity, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidInput("dissimilarity matrix must be square")
    n = len(D)
    if n == 0:
        return np.zeros((0, 2))
    scale = max(1.0, float(np.abs(D).max()))
    if not np.all(np.isfinite(D)):
        raise InvalidInput("dissimilarity matrix has non-finite entries")
    if np.any(D < 0):
        raise InvalidInput("dissimilarity matrix has negative entries")
    if np.abs(D - D.T).max() > 1e-12 * scale:
        raise InvalidInput("dissimilarity matrix is not symmetric")
    if np.abs(np.diag(D)).max() > 1e-12 * scale:
        raise InvalidInput("dissimilarity matrix has a non-zero diagonal")
    D = (D + D.T) / 2
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ (D ** 2) @ J
    B = (B + B.T) / 2
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1][:2]
    lam = np.clip(evals[order], 0, None)
    # eigenvalues at roundoff level would otherwise become sqrt(eps)-sized coordinates
    lam[lam <= n * np.finfo(float).eps * max(lam.max(initial=0.0), 0.0)] = 0.0
    Y = np.zeros((n, 2))
    Y[:, :len(order)] = evecs[:, order] * np.sqrt(lam)
    # fix the sign of each axis so the output is reproducible
    for j in range(Y.shape[1]):
        col = Y[:, j]
        if col.size and col[np.argmax(np.abs(col))] < 0:
            Y[:, j] = -col
    return Y - Y.mean(axis=0)
