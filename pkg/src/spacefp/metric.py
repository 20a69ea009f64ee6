"""Distances between feature vectors.

MPD is the default: the mean over elements of ``|v - w| / (|v| + |w|)`` with
``0/0 := 0`` (a Canberra distance divided by the vector length). The other
kinds are kept for experimentation.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import EmptyInput, IncomparableVectors
from .model import FeatureVector


class MetricKind(str, enum.Enum):
    MPD = "mpd"
    TAD = "tad"
    TPD = "tpd"
    MAD = "mad"
    EUCLIDEAN = "euclidean"

    @classmethod
    def parse(cls, value) -> "MetricKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def _check_pair(v: FeatureVector, w: FeatureVector):
    if not v.comparable(w):
        raise IncomparableVectors(
            f"vectors differ in parameters or layout: (fd={v.fd}, fr={v.fr}, n={len(v)}) "
            f"vs (fd={w.fd}, fr={w.fr}, n={len(w)})")


def _ratios(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    num = np.abs(a - b)
    den = np.abs(a) + np.abs(b)
    out = np.zeros(np.broadcast(a, b).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def _reduce(a: np.ndarray, b: np.ndarray, kind: MetricKind) -> float:
    # fsum makes the accumulated sum independent of element order and padding
    n = a.shape[-1]
    if kind is MetricKind.MPD:
        return math.fsum(_ratios(a, b)) / n
    if kind is MetricKind.TPD:
        return math.fsum(_ratios(a, b))
    if kind is MetricKind.TAD:
        return math.fsum(np.abs(a - b))
    if kind is MetricKind.MAD:
        return math.fsum(np.abs(a - b)) / n
    return math.sqrt(math.fsum((a - b) ** 2))


def distance(v: FeatureVector, w: FeatureVector, kind=MetricKind.MPD) -> float:
    _check_pair(v, w)
    kind = MetricKind.parse(kind)
    if len(v) == 0:
        return 0.0
    return _reduce(v.values, w.values, kind)


def vector_average(vs: Sequence[FeatureVector]) -> FeatureVector:
    vs = list(vs)
    if not vs:
        raise EmptyInput("cannot average an empty list of vectors")
    first = vs[0]
    for v in vs[1:]:
        _check_pair(first, v)
    if len(vs) == 1:
        return first
    stacked = np.stack([v.values for v in vs])
    # exactly rounded column sums keep the mean independent of input order
    mean = np.array([math.fsum(col) for col in stacked.T]) / len(vs) if len(first) else stacked[0]
    return FeatureVector(mean, first.layout, first.fd, first.fr)


def pairwise_distance_matrix(vs: Sequence[FeatureVector], kind=MetricKind.MPD) -> np.ndarray:
    vs = list(vs)
    kind = MetricKind.parse(kind)
    for v in vs[1:]:
        _check_pair(vs[0], v)
    n = len(vs)
    D = np.zeros((n, n))
    if n < 2 or len(vs[0]) == 0:
        return D
    X = np.stack([v.values for v in vs])
    for i in range(n - 1):
        rest = X[i + 1:]
        if kind in (MetricKind.MPD, MetricKind.TPD):
            rows = _ratios(X[i], rest)
        elif kind is MetricKind.EUCLIDEAN:
            rows = (X[i] - rest) ** 2
        else:
            rows = np.abs(X[i] - rest)
        for j, row in enumerate(rows, start=i + 1):
            s = math.fsum(row)
            if kind in (MetricKind.MPD, MetricKind.MAD):
                s /= X.shape[1]
            elif kind is MetricKind.EUCLIDEAN:
                s = math.sqrt(s)
            D[i, j] = D[j, i] = s
    return D


def mean_pairwise_distance(vs: Sequence[FeatureVector], kind=MetricKind.MPD) -> float:
    """Average of the distance over all unordered pairs (0.0 for fewer than two vectors)."""
    n = len(vs)
    if n < 2:
        return 0.0
    D = pairwise_distance_matrix(vs, kind)
    return math.fsum(D[np.triu_indices(n, 1)]) / (n * (n - 1) // 2)


_CDIST = {
    MetricKind.MPD: "canberra",
    MetricKind.TPD: "canberra",
    MetricKind.TAD: "cityblock",
    MetricKind.MAD: "cityblock",
    MetricKind.EUCLIDEAN: "euclidean",
}


def cross_distances(X: np.ndarray, Y: np.ndarray, kind=MetricKind.MPD) -> np.ndarray:
    """Fast ``(len(X), len(Y))`` distance block on raw arrays.

    Uses scipy's C kernels; agrees with :func:`distance` up to summation
    rounding. Meant for inner loops (k-means assignment), not for reported
    values.
    """
    kind = MetricKind.parse(kind)
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    D = cdist(X, Y, metric=_CDIST[kind])
    if kind in (MetricKind.MPD, MetricKind.MAD):
        D /= X.shape[1]
    return D


def write_matrix_csv(path, D: np.ndarray) -> None:
    """Square, headerless, row-major CSV with round-trip float formatting."""
    with open(path, "w", newline="") as fh:
        for row in np.asarray(D):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)
