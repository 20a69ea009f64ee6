import numpy as np
import pytest

from spacefp.model import DetectionSet


def make_set(records, time_unit="unit"):
    return DetectionSet.from_records(records, time_unit)


def random_epoch(rng, fd, fr, n_devices, density=0.4, space="s"):
    """Random detections on [0, fd) from up to ``n_devices`` devices."""
    recs = []
    for d in range(n_devices):
        for t in range(fd):
            if rng.random() < density:
                recs.append((f"d{d}", space, t))
    rng.shuffle(recs)
    return make_set(recs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
