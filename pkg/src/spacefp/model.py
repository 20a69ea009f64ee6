"""Domain types: detection records, windows, feature vectors and fingerprints.

Timestamps are non-negative integers in an abstract time unit that is fixed
per dataset. A :class:`DetectionSet` is stored column-wise (integer codes into
device/space vocabularies plus a timestamp array) so that synthetic datasets
with millions of records stay cheap to build and slice.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyDataset, InvalidParameters


@dataclass(frozen=True)
class Detection:
    device_id: str
    space_id: str
    timestamp: int

    def __post_init__(self):
        if not self.device_id or not self.space_id:
            raise InvalidParameters("device_id and space_id must be non-empty")
        if self.timestamp < 0:
            raise InvalidParameters(f"negative timestamp {self.timestamp}")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True).reshape(-1)
    a.setflags(write=False)
    return a


class DetectionSet:
    """Immutable multiset of detections.

    ``device`` and ``space`` hold indices into the ``device_ids`` and
    ``space_ids`` vocabularies. Vocabulary entries need not all be used.
    """

    __slots__ = ("device_ids", "space_ids", "device", "space", "timestamp", "time_unit")

    def __init__(self, device_ids: Sequence[str], space_ids: Sequence[str],
                 device, space, timestamp, time_unit: str = "unit"):
        device_ids = tuple(device_ids)
        space_ids = tuple(space_ids)
        device = _frozen(device, np.int64)
        space = _frozen(space, np.int64)
        timestamp = _frozen(timestamp, np.int64)
        if not (len(device) == len(space) == len(timestamp)):
            raise InvalidParameters("column lengths differ")
        if any(not d for d in device_ids) or any(not s for s in space_ids):
            raise InvalidParameters("device_id and space_id must be non-empty")
        if len(timestamp):
            if timestamp.min() < 0:
                raise InvalidParameters("timestamps must be non-negative")
            if device.min() < 0 or device.max() >= len(device_ids):
                raise InvalidParameters("device code out of range")
            if space.min() < 0 or space.max() >= len(space_ids):
                raise InvalidParameters("space code out of range")
        object.__setattr__(self, "device_ids", device_ids)
        object.__setattr__(self, "space_ids", space_ids)
        object.__setattr__(self, "device", device)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "timestamp", timestamp)
        object.__setattr__(self, "time_unit", time_unit)

    def __setattr__(self, name, value):
        raise AttributeError("DetectionSet is immutable")

    @classmethod
    def from_records(cls, records: Iterable, time_unit: str = "unit") -> "DetectionSet":
        """Build from :class:`Detection` objects or ``(device, space, t)`` tuples."""
        dev_index: dict[str, int] = {}
        sp_index: dict[str, int] = {}
        dev, sp, ts = [], [], []
        for rec in records:
            if not isinstance(rec, Detection):
                rec = Detection(*rec)
            dev.append(dev_index.setdefault(rec.device_id, len(dev_index)))
            sp.append(sp_index.setdefault(rec.space_id, len(sp_index)))
            ts.append(rec.timestamp)
        return cls(tuple(dev_index), tuple(sp_index), dev, sp, ts, time_unit)

    @classmethod
    def empty(cls, time_unit: str = "unit") -> "DetectionSet":
        return cls((), (), [], [], [], time_unit)

    def __len__(self) -> int:
        return len(self.timestamp)

    def __iter__(self) -> Iterator[Detection]:
        for d, s, t in zip(self.device.tolist(), self.space.tolist(), self.timestamp.tolist()):
            yield Detection(self.device_ids[d], self.space_ids[s], t)

    def __repr__(self):
        return (f"DetectionSet(n={len(self)}, devices={len(self.device_ids)}, "
                f"spaces={len(self.space_ids)}, unit={self.time_unit!r})")

    def as_counter(self) -> Counter:
        return Counter((r.device_id, r.space_id, r.timestamp) for r in self)

    def same_records(self, other: "DetectionSet") -> bool:
        """Multiset equality of the records, ignoring order and vocabularies."""
        return len(self) == len(other) and self.as_counter() == other.as_counter()

    @property
    def t_min(self) -> int:
        if not len(self):
            raise EmptyDataset("t_min of an empty detection set")
        return int(self.timestamp.min())

    @property
    def t_max(self) -> int:
        if not len(self):
            raise EmptyDataset("t_max of an empty detection set")
        return int(self.timestamp.max())

    @property
    def dur(self) -> int:
        return self.t_max - self.t_min

    def with_columns(self, device=None, space=None, timestamp=None) -> "DetectionSet":
        return DetectionSet(
            self.device_ids, self.space_ids,
            self.device if device is None else device,
            self.space if space is None else space,
            self.timestamp if timestamp is None else timestamp,
            self.time_unit,
        )

    def select(self, mask) -> "DetectionSet":
        """Records where ``mask`` (bool array or index array) holds; vocabularies are shared."""
        return self.with_columns(self.device[mask], self.space[mask], self.timestamp[mask])

    def shifted(self, delta: int) -> "DetectionSet":
        return self.with_columns(timestamp=self.timestamp + int(delta))

    def space_list(self) -> list[str]:
        """Space ids that actually occur, in order of first appearance."""
        if not len(self):
            return []
        _, first = np.unique(self.space, return_index=True)
        codes = self.space[np.sort(first)]
        return [self.space_ids[c] for c in codes.tolist()]

    def compact(self, fr: int) -> "DetectionSet":
        """Keep only the earliest record per (device, space, t // fr) cell.

        Presence features at resolution ``fr`` (or any multiple of it) are
        unchanged, since bucket membership is all they depend on.
        """
        if fr < 1:
            raise InvalidParameters("fr must be positive")
        if not len(self):
            return self
        cell = self.timestamp // fr
        order = np.lexsort((self.timestamp, cell, self.device, self.space))
        key = np.stack([self.space[order], self.device[order], cell[order]])
        keep = np.ones(len(order), dtype=bool)
        keep[1:] = np.any(key[:, 1:] != key[:, :-1], axis=0)
        return self.select(np.sort(order[keep]))


def normalize_time(dt: DetectionSet) -> DetectionSet:
    """Shift all timestamps so the earliest detection sits at time 0."""
    if not len(dt):
        raise EmptyDataset("cannot normalize an empty detection set")
    t0 = dt.t_min
    return dt if t0 == 0 else dt.shifted(-t0)


def restrict_to_space(dt: DetectionSet, space_id: str) -> DetectionSet:
    try:
        code = dt.space_ids.index(space_id)
    except ValueError:
        return dt.select(np.zeros(len(dt), dtype=bool))
    return dt.select(dt.space == code)


@dataclass(frozen=True)
class Window:
    t_start: int
    tau: int

    def __post_init__(self):
        if self.t_start < 0 or self.tau < 1:
            raise InvalidParameters(f"invalid window {self}")


@dataclass(frozen=True)
class FeatureIndex:
    window: Window
    sampling_period: int

    @property
    def t_start(self) -> int:
        return self.window.t_start

    @property
    def tau(self) -> int:
        return self.window.tau

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.window.t_start, self.window.tau, self.sampling_period)

    def label(self) -> str:
        return f"t{self.window.t_start}_tau{self.window.tau}_ts{self.sampling_period}"


def check_params(fd: int, fr: int) -> int:
    """Validate an (fd, fr) pair and return the ratio fd // fr."""
    if int(fd) != fd or int(fr) != fr or fd < 1 or fr < 1:
        raise InvalidParameters(f"fd and fr must be positive integers, got fd={fd}, fr={fr}")
    if fd % fr:
        raise InvalidParameters(f"fd={fd} is not a multiple of fr={fr}")
    return int(fd) // int(fr)


@lru_cache(maxsize=None)
def divisor_counts(limit: int) -> tuple[int, ...]:
    counts = [0] * (limit + 1)
    for k in range(1, limit + 1):
        for m in range(k, limit + 1, k):
            counts[m] += 1
    return tuple(counts)


def divisors(n: int) -> list[int]:
    small = [k for k in range(1, int(n ** 0.5) + 1) if n % k == 0]
    return sorted(set(small + [n // k for k in small]))


def feature_count(fd: int, fr: int) -> int:
    """Number of admissible (t_start, tau, T_s) triples for (fd, fr)."""
    R = check_params(fd, fr)
    d = divisor_counts(R)
    return sum((R - tau + 1) * d[tau] for tau in range(1, R + 1))


@lru_cache(maxsize=64)
def grid_triples(R: int) -> tuple[tuple[int, int, int], ...]:
    """Canonical (t_start, tau, T_s) order in grid units: t_start, tau, T_s ascending."""
    out = []
    for s in range(R):
        for tau in range(1, R - s + 1):
            for k in divisors(tau):
                out.append((s, tau, k))
    return tuple(out)


@lru_cache(maxsize=64)
def feature_layout(fd: int, fr: int) -> tuple[FeatureIndex, ...]:
    R = check_params(fd, fr)
    return tuple(FeatureIndex(Window(s * fr, tau * fr), k * fr) for s, tau, k in grid_triples(R))


@lru_cache(maxsize=64)
def density_layout(fd: int, fr: int) -> tuple[FeatureIndex, ...]:
    R = check_params(fd, fr)
    return tuple(FeatureIndex(Window(i * fr, fr), fr) for i in range(R))


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    layout: tuple[FeatureIndex, ...] = field(repr=False)
    fd: int
    fr: int

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if len(v) != len(self.layout):
            raise InvalidParameters(f"{len(v)} values for a layout of {len(self.layout)}")

    def __len__(self) -> int:
        return len(self.values)

    def comparable(self, other: "FeatureVector") -> bool:
        return (self.fd == other.fd and self.fr == other.fr
                and len(self) == len(other)
                and (self.layout is other.layout or self.layout == other.layout))

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return self.comparable(other) and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True)
class Fingerprint:
    vector: FeatureVector
    fd: int
    fr: int
    space_id: str | None = None

    def __post_init__(self):
        check_params(self.fd, self.fr)
        if (self.vector.fd, self.vector.fr) != (self.fd, self.fr):
            raise InvalidParameters("vector parameters differ from fingerprint parameters")

    @property
    def r(self) -> int:
        return self.fd // self.fr

    def to_dict(self) -> dict:
        return {
            "space_id": self.space_id,
            "fd": self.fd,
            "fr": self.fr,
            "layout": [list(ix.as_tuple()) for ix in self.vector.layout],
            "values": [float(x) for x in self.vector.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Fingerprint":
        fd, fr = int(data["fd"]), int(data["fr"])
        layout = tuple(FeatureIndex(Window(a, b), c) for a, b, c in data["layout"])
        canonical = feature_layout(fd, fr)
        if layout == canonical:
            layout = canonical
        return cls(FeatureVector(np.asarray(data["values"], float), layout, fd, fr),
                   fd, fr, data.get("space_id"))
