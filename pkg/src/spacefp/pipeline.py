"""End-to-end fingerprinting of one space."""

from __future__ import annotations

import json

import numpy as np

from .errors import InsufficientData, InvalidParameters
from .metric import vector_average
from .model import DetectionSet, FeatureVector, Fingerprint, check_params, normalize_time, restrict_to_space
from .params import ParamSearchConfig, fingerprint_parameters, slice_epochs
from .vectorize import density_vector, vectorize


def _space_stream(dt: DetectionSet, space_id: str) -> DetectionSet:
    sub = restrict_to_space(dt, space_id)
    if not len(sub):
        raise InsufficientData(f"no detections for space {space_id!r}")
    return normalize_time(sub)


def _epochs(dt_bar: DetectionSet, fd: int, space_id: str):
    epochs = slice_epochs(dt_bar, fd)
    if not epochs:
        raise InsufficientData(
            f"space {space_id!r} spans {dt_bar.dur} units, less than one epoch of {fd}")
    return epochs


def epoch_vectors(dt: DetectionSet, space_id: str, fd: int, fr: int,
                  method: str = "presence") -> list[FeatureVector]:
    """Per-epoch vectors of one space in chronological order.

    ``method="density"`` gives the density baseline instead of presence features.
    """
    check_params(fd, fr)
    fn = density_vector if method == "density" else vectorize
    return [fn(e, fd, fr) for e in _epochs(_space_stream(dt, space_id), fd, space_id)]


def spaceprint(dt: DetectionSet, space_id: str, cfg: ParamSearchConfig | None = None,
               override: tuple[int, int] | None = None) -> Fingerprint:
    """Fingerprint of ``space_id``.

    Parameters come from :func:`fingerprint_parameters` unless
    ``override=(fd, fr)`` is given. At least two complete epochs are required.
    """
    stream = _space_stream(dt, space_id)
    if override is not None:
        fd, fr = override
        check_params(fd, fr)
    else:
        if cfg is None:
            raise ValueError("either cfg or override is required")
        fd, fr, _ = fingerprint_parameters(stream, cfg)
    epochs = _epochs(stream, fd, space_id)
    if len(epochs) < 2:
        raise InsufficientData(f"space {space_id!r} has {len(epochs)} complete epoch(s) of {fd}, need 2")
    vec = vector_average([vectorize(e, fd, fr) for e in epochs])
    return Fingerprint(vec, fd, fr, space_id)


def save_fingerprint(fp: Fingerprint, path) -> None:
    with open(path, "w") as fh:
        json.dump(fp.to_dict(), fh, separators=(",", ":"))
        fh.write("\n")


def load_fingerprint(path) -> Fingerprint:
    with open(path) as fh:
        return Fingerprint.from_dict(json.load(fh))


def drop_days(dt_bar: DetectionSet, days, day_length: int, cycle_days: int = 7) -> DetectionSet:
    """Remove records whose day-of-cycle index is in ``days`` and close the gaps.

    Day ``D = t // day_length`` has cycle index ``D % cycle_days``. Remaining
    days are shifted left so they form one contiguous stream, e.g. weekdays
    only for ``days={5, 6}``.
    """
    days = sorted({int(d) for d in days})
    if day_length < 1 or cycle_days < 1 or any(not 0 <= d < cycle_days for d in days):
        raise InvalidParameters("invalid day filter")
    if not days or not len(dt_bar):
        return dt_bar
    dropped = np.zeros(cycle_days, dtype=bool)
    dropped[days] = True
    before = np.concatenate([[0], np.cumsum(dropped)])  # dropped days in [0, j) of a cycle
    day = dt_bar.timestamp // day_length
    keep = ~dropped[day % cycle_days]
    shift = (day // cycle_days) * len(days) + before[day % cycle_days]
    kept = dt_bar.select(keep)
    return kept.with_columns(timestamp=kept.timestamp - shift[keep] * day_length)
