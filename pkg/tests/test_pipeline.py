import json

import numpy as np
import pytest

from spacefp.errors import InsufficientData
from spacefp.metric import vector_average
from spacefp.params import ParamSearchConfig
from spacefp.pipeline import drop_days, epoch_vectors, load_fingerprint, save_fingerprint, spaceprint
from spacefp.vectorize import vectorize

from conftest import make_set


def periodic(epochs, fd=12, offset=0, space="s"):
    pattern = [("a", 0), ("a", 1), ("b", 5), ("c", 5), ("c", 9), ("d", 11)]
    return [(d, space, offset + e * fd + t) for e in range(epochs) for d, t in pattern]


class TestSpaceprint:
    def test_periodic_equals_single_epoch(self):
        dt = make_set(periodic(5))
        fp = spaceprint(dt, "s", override=(12, 2))
        one = vectorize(make_set(periodic(1)), 12, 2)
        assert fp.vector == one
        assert (fp.fd, fp.fr, fp.space_id) == (12, 2, "s")

    def test_always_present_is_all_ones(self):
        dt = make_set([("a", "s", t) for t in range(8)])
        fp = spaceprint(dt, "s", override=(4, 1))
        assert fp.vector.values.tolist() == [1.0] * 17

    def test_average_over_epochs(self):
        dt = make_set([("a", "s", 0), ("a", "s", 1), ("b", "s", 2), ("b", "s", 3)])
        fp = spaceprint(dt, "s", override=(2, 1))
        assert fp.vector.values.tolist() == [1.0, 1.0, 1.0, 1.0]
        dt = make_set([("a", "s", 0), ("a", "s", 1), ("b", "s", 2), ("c", "s", 3)])
        assert spaceprint(dt, "s", override=(2, 1)).vector.values.tolist() == [0.75, 0.5, 1.0, 0.75]

    def test_shift_invariant(self):
        a = spaceprint(make_set(periodic(3)), "s", override=(12, 3))
        b = spaceprint(make_set(periodic(3, offset=1000)), "s", override=(12, 3))
        assert a.vector == b.vector

    def test_other_spaces_ignored(self):
        mixed = make_set(periodic(3) + periodic(3, space="t", offset=7) + [("z", "t", 2)])
        assert spaceprint(mixed, "s", override=(12, 1)).vector == \
            spaceprint(make_set(periodic(3)), "s", override=(12, 1)).vector

    def test_automatic_parameters(self):
        fp = spaceprint(make_set(periodic(10)), "s", ParamSearchConfig(r=12))
        assert fp.fd == 12

    def test_single_epoch_rejected(self):
        with pytest.raises(InsufficientData):
            spaceprint(make_set(periodic(1)), "s", override=(12, 1))

    def test_unknown_space(self):
        with pytest.raises(InsufficientData):
            spaceprint(make_set(periodic(3)), "nope", override=(12, 1))

    def test_json_round_trip(self, tmp_path):
        fp = spaceprint(make_set(periodic(4)), "s", override=(12, 2))
        save_fingerprint(fp, tmp_path / "fp.json")
        back = load_fingerprint(tmp_path / "fp.json")
        assert back.vector == fp.vector and back.space_id == "s" and (back.fd, back.fr) == (12, 2)


class TestEpochVectors:
    def test_trailing_partial_epoch_dropped(self):
        dt = make_set(periodic(3) + [("x", "s", 37)])
        assert len(epoch_vectors(dt, "s", 12, 1)) == 3

    def test_density_method(self):
        vs = epoch_vectors(make_set(periodic(2)), "s", 12, 6, method="density")
        assert [v.values.tolist() for v in vs] == [[1.0, 2 / 3]] * 2

    def test_short_stream(self):
        with pytest.raises(InsufficientData):
            epoch_vectors(make_set([("a", "s", 0), ("a", "s", 5)]), "s", 12, 1)


class TestDropDays:
    def test_weekdays_only(self):
        # two weeks, one record per day at hour 3, day length 24
        dt = make_set([("a", "s", d * 24 + 3) for d in range(14)])
        out = drop_days(dt, {5, 6}, 24)
        assert out.timestamp.tolist() == [d * 24 + 3 for d in range(10)]

    def test_no_filter_is_identity(self):
        dt = make_set([("a", "s", 4)])
        assert drop_days(dt, [], 24) is dt

    def test_invalid_day(self):
        with pytest.raises(ValueError):
            drop_days(make_set([("a", "s", 4)]), [7], 24)

    def test_matches_loop(self, rng):
        ts = sorted(int(t) for t in rng.integers(0, 24 * 21, 200))
        dt = make_set([("a", "s", t) for t in ts])
        days = {0, 3}
        kept = [t for t in ts if (t // 24) % 7 not in days]
        expect = []
        for t in kept:
            d = t // 24
            removed = sum(1 for x in range(d) if x % 7 in days)
            expect.append(t - removed * 24)
        assert drop_days(dt, days, 24).timestamp.tolist() == expect
        assert np.all(np.diff(drop_days(dt, days, 24).timestamp) >= 0)


def test_spaceprint_is_average_of_epoch_vectors(rng):
    recs = [(f"d{int(rng.integers(5))}", "s", int(t)) for t in rng.integers(0, 60, 150)]
    dt = make_set(recs + [("z", "s", 59)])
    assert spaceprint(dt, "s", override=(12, 3)).vector.values.tobytes() == \
        vector_average(epoch_vectors(dt, "s", 12, 3)).values.tobytes()


def test_empty_epoch_inside_span_is_zero_vector():
    dt = make_set(periodic(1) + periodic(1, offset=24))
    vs = epoch_vectors(dt, "s", 12, 1)
    assert len(vs) == 3 and not vs[1].values.any() and vs[0] == vs[2]


def test_fingerprint_json_shape(tmp_path):
    fp = spaceprint(make_set(periodic(2)), "s", override=(12, 6))
    save_fingerprint(fp, tmp_path / "fp.json")
    obj = json.loads((tmp_path / "fp.json").read_text())
    assert set(obj) == {"space_id", "fd", "fr", "layout", "values"}
    assert obj["layout"] == [[0, 6, 6], [0, 12, 6], [0, 12, 12], [6, 6, 6]]
