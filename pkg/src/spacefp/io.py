"""CSV/JSON readers and writers for detections, vectors and evaluation output."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError
from .model import DetectionSet, FeatureVector

log = logging.getLogger(__name__)

DETECTION_HEADER = ["device_id", "space_id", "timestamp"]


def ingest_csv(path, time_unit: str = "unit") -> DetectionSet:
    """Read a ``device_id,space_id,timestamp`` file; fail on the first bad row."""
    path = Path(path)
    if not path.is_file():
        raise ParseError("file not found", path)
    dev_index: dict[str, int] = {}
    sp_index: dict[str, int] = {}
    dev, sp, ts = [], [], []
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != DETECTION_HEADER:
            raise ParseError(f"expected header {','.join(DETECTION_HEADER)}, got {header}", path, 1)
        for row in reader:
            line = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", path, line)
            device, space, stamp = (x.strip() for x in row)
            if not device or not space:
                raise ParseError("empty device_id or space_id", path, line)
            if not stamp.isdigit() or not stamp.isascii():
                raise ParseError(f"timestamp {stamp!r} is not a non-negative base-10 integer",
                                 path, line)
            dev.append(dev_index.setdefault(device, len(dev_index)))
            sp.append(sp_index.setdefault(space, len(sp_index)))
            ts.append(int(stamp))
    log.info("read %d detections (%d devices, %d spaces) from %s",
             len(ts), len(dev_index), len(sp_index), path)
    return DetectionSet(tuple(dev_index), tuple(sp_index), dev, sp, ts, time_unit)


def write_detections_csv(path, sets: DetectionSet | Iterable[DetectionSet]) -> int:
    """Write one or more detection sets into a single CSV; returns the row count."""
    if isinstance(sets, DetectionSet):
        sets = [sets]
    n = 0
    with open(path, "w", newline="") as fh:
        fh.write(",".join(DETECTION_HEADER) + "\n")
        for dt in sets:
            devs = np.asarray(dt.device_ids, dtype=object)
            sps = np.asarray(dt.space_ids, dtype=object)
            if not len(dt):
                continue
            lines = (devs[dt.device].astype(str).astype(object) + ","
                     + sps[dt.space].astype(str).astype(object) + ","
                     + dt.timestamp.astype(str).astype(object))
            fh.write("\n".join(lines.tolist()) + "\n")
            n += len(dt)
    return n


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def read_rows(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        return list(csv.DictReader(fh))


def write_truth_csv(path, pairs: Iterable[tuple[str, str]]) -> None:
    write_rows(path, ["instance_id", "space_id"], pairs)


def read_truth_csv(path) -> dict[str, str]:
    rows = read_rows(path)
    if rows and set(rows[0]) != {"instance_id", "space_id"}:
        raise ParseError("expected header instance_id,space_id", path, 1)
    return {r["instance_id"]: r["space_id"] for r in rows}


def write_assignments_csv(path, point_ids: Sequence[str], clusters: Sequence[int]) -> None:
    write_rows(path, ["point_id", "cluster"], zip(point_ids, clusters))


def write_vectors_csv(path, keys: Sequence[tuple], key_names: Sequence[str],
                      vectors: Sequence[FeatureVector]) -> None:
    """Wide CSV: key columns followed by one column per layout entry."""
    labels = [ix.label() for ix in vectors[0].layout] if vectors else []
    write_rows(path, list(key_names) + labels,
               (list(k) + v.values.tolist() for k, v in zip(keys, vectors)))


def write_coords_csv(path, point_ids, coords: np.ndarray, labels) -> None:
    write_rows(path, ["point_id", "x", "y", "label"],
               ((pid, float(x), float(y), lab) for pid, (x, y), lab in zip(point_ids, coords, labels)))


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
