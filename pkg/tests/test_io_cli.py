import json
import re
import subprocess
import sys

import pytest

from spacefp.cli import main
from spacefp.errors import ParseError
from spacefp.io import ingest_csv, read_truth_csv, write_detections_csv, write_json

from conftest import make_set

SYNTH = ["--ns", "3", "--ni", "4", "--fd", "48", "--fr", "4", "--ng-min", "2", "--ng-max", "6",
         "--np-min", "3", "--np-max", "6"]


def write(path, text):
    path.write_text(text)
    return path


def files(out):
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.suffix in (".csv", ".json")}


class TestIngest:
    def test_valid(self, tmp_path):
        p = write(tmp_path / "d.csv", "device_id,space_id,timestamp\na,s,3\nb,s,0\n\na,t,10\n")
        dt = ingest_csv(p, "min")
        assert dt.same_records(make_set([("a", "s", 3), ("b", "s", 0), ("a", "t", 10)]))
        assert dt.time_unit == "min"

    def test_negative_timestamp_names_line(self, tmp_path):
        p = write(tmp_path / "d.csv", "device_id,space_id,timestamp\na,s,3\nb,s,-1\n")
        with pytest.raises(ParseError) as err:
            ingest_csv(p)
        assert err.value.line == 3 and "d.csv:3:" in str(err.value)

    @pytest.mark.parametrize("body", ["a,s\n", ",s,1\n", "a,s,1.5\n", "a,s,x\n", "a,s,1,2\n"])
    def test_bad_rows(self, tmp_path, body):
        with pytest.raises(ParseError):
            ingest_csv(write(tmp_path / "d.csv", "device_id,space_id,timestamp\n" + body))

    def test_bad_header(self, tmp_path):
        with pytest.raises(ParseError):
            ingest_csv(write(tmp_path / "d.csv", "device,space,time\na,s,1\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            ingest_csv(tmp_path / "nope.csv")

    def test_bom_accepted(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_bytes("﻿device_id,space_id,timestamp\na,s,1\n".encode("utf-8"))
        assert len(ingest_csv(p)) == 1

    def test_round_trip(self, tmp_path):
        dt = make_set([("a", "s", 5), ("b,c", "t", 0), ("a", "s", 5)])
        write_detections_csv(tmp_path / "d.csv", make_set([("a", "s", 5), ("b", "t", 0), ("a", "s", 5)]))
        assert ingest_csv(tmp_path / "d.csv").same_records(
            make_set([("a", "s", 5), ("b", "t", 0), ("a", "s", 5)]))
        assert len(dt) == 3

    def test_json_sorted(self, tmp_path):
        write_json(tmp_path / "x.json", {"b": 1, "a": [1.5]})
        assert (tmp_path / "x.json").read_text() == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'


class TestCli:
    def test_synth_then_cluster_zero_noise(self, tmp_path):
        data = tmp_path / "data"
        assert main(["synth", "--out", str(data), "--seed", "4", *SYNTH]) == 0
        truth = read_truth_csv(data / "truth.csv")
        assert len(truth) == 12
        for method in ("sp", "db"):
            out = tmp_path / method
            assert main(["cluster", "--out", str(out), "--input", str(data / "detections.csv"),
                         "--truth", str(data / "truth.csv"), "--fd", "48", "--fr", "4",
                         "--method", method, "--seed", "4"]) == 0
            report = json.loads((out / "report.json").read_text())
            assert report["accuracy"] == 1.0 and report["k"] == 3

    def test_params_constant_data(self, tmp_path):
        p = write(tmp_path / "d.csv", "device_id,space_id,timestamp\n"
                  + "".join(f"a,s,{t}\n" for t in range(60)))
        out = tmp_path / "o"
        assert main(["params", "--out", str(out), "--input", str(p), "--ratio", "6"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["results"] == {"s": {"fd": 6, "fr": 1}}
        assert manifest["command"] == "params" and "numpy" in manifest["versions"]
        assert (out / "duration_trace_s.csv").exists() and (out / "resolution_trace_s.svg").exists()

    def test_fingerprint_and_vectorize(self, tmp_path):
        p = write(tmp_path / "d.csv", "device_id,space_id,timestamp\n"
                  + "".join(f"a,s,{t}\nb,s,{t}\n" for t in range(0, 24, 2)) + "c,s,23\n")
        out = tmp_path / "o"
        assert main(["fingerprint", "--out", str(out), "--input", str(p), "--fd", "6", "--fr", "2"]) == 0
        fp = json.loads((out / "fingerprint_s.json").read_text())
        assert (fp["fd"], fp["fr"], len(fp["values"])) == (6, 2, 9)
        assert main(["vectorize", "--out", str(out), "--input", str(p), "--fd", "6", "--fr", "2"]) == 0
        lines = (out / "epoch_vectors.csv").read_text().splitlines()
        assert lines[0].startswith("space_id,epoch,t0_tau2_ts2") and len(lines) == 5
        assert main(["baseline", "--out", str(out), "--input", str(p), "--fd", "6", "--fr", "2"]) == 0
        assert (out / "density_vectors.csv").read_text().splitlines()[0] == \
            "space_id,epoch,t0_tau2_ts2,t2_tau2_ts2,t4_tau2_ts2"

    def test_mds_svg_has_one_color_per_group(self, tmp_path):
        rows = []
        for g in range(8):
            for e in range(3):
                rows += [f"d{g}.{k},g{g}.{e},{t}" for k in range(g + 1) for t in range(g, g + 3)]
                rows.append(f"x,g{g}.{e},11")
        p = write(tmp_path / "d.csv", "device_id,space_id,timestamp\n" + "\n".join(rows) + "\n")
        truth = write(tmp_path / "t.csv", "instance_id,space_id\n"
                      + "".join(f"g{g}.{e},G{g}\n" for g in range(8) for e in range(3)))
        out = tmp_path / "o"
        assert main(["mds", "--out", str(out), "--input", str(p), "--truth", str(truth),
                     "--fd", "12", "--fr", "1"]) == 0
        svg = (out / "mds.svg").read_text()
        fills = set(re.findall(r"fill:\s*(#[0-9a-f]{6})", svg)) - {"#ffffff", "#000000"}
        assert len(fills) >= 8
        assert len((out / "coords.csv").read_text().splitlines()) == 25

    def test_determinism(self, tmp_path):
        runs = []
        for tag in ("a", "b"):
            data = tmp_path / tag / "data"
            main(["synth", "--out", str(data), "--seed", "9", "--rho", "0.3", "--alpha-ts", "0.1", *SYNTH])
            out = tmp_path / tag / "c"
            main(["cluster", "--out", str(out), "--input", str(data / "detections.csv"),
                  "--truth", str(data / "truth.csv"), "--fd", "48", "--fr", "4", "--seed", "9"])
            runs.append({**files(data), **{"c/" + k: v for k, v in files(out).items()}})
        a, b = runs
        for name in a:
            if name.endswith("manifest.json"):
                ma, mb = json.loads(a[name]), json.loads(b[name])
                ma["args"].pop("input", None), ma["args"].pop("truth", None)
                mb["args"].pop("input", None), mb["args"].pop("truth", None)
                assert ma == mb
            else:
                assert a[name] == b[name], name

    @pytest.mark.parametrize("body,code", [
        ("device_id,space_id,timestamp\na,s,-4\n", 2),
        ("device_id,space_id,timestamp\na,s,4\n", 3),
    ])
    def test_exit_codes(self, tmp_path, body, code, capsys):
        p = write(tmp_path / "d.csv", body)
        assert main(["params", "--out", str(tmp_path / "o"), "--input", str(p), "--ratio", "4"]) == code
        assert "spacefp params:" in capsys.readouterr().err

    def test_invalid_parameters_exit_code(self, tmp_path):
        p = write(tmp_path / "d.csv", "device_id,space_id,timestamp\na,s,4\n")
        assert main(["vectorize", "--out", str(tmp_path / "o"), "--input", str(p),
                     "--fd", "7", "--fr", "2"]) == 4

    def test_module_entry_point(self, tmp_path):
        r = subprocess.run([sys.executable, "-m", "spacefp", "--version"], capture_output=True, text=True)
        assert r.returncode == 0 and r.stdout.strip()
