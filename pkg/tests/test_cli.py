import csv
import hashlib
import json
import subprocess
import sys

import pytest

from swtomo.cli import run


def manifest(path):
    return json.loads((path / "manifest.json").read_text())


def test_pdf_example(tmp_path):
    assert run(["pdf", "--p", "0.7", "--n", "10", "--n", "100", "--seed", "1", "--grid", "512",
                "--out", str(tmp_path)]) == 0
    m = manifest(tmp_path)
    assert set(m["outputs"]) == {"pdf_n10.csv", "pdf_n100.csv", "pdf_summary.json"}
    for name, digest in m["outputs"].items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest
    with open(tmp_path / "pdf_n10.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["lambda_index", "angle_rad", "density", "weight"]
    assert len(rows) == 6 * 512
    assert m["all_checks_pass"] and m["seed"] == 1
    assert "wall_time_s" in m["runtime"] and "versions" in m


def test_oracle_example(tmp_path):
    assert run(["oracle", "--max-n", "5", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "oracle.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3 * 5 * 2
    assert all(r["holds"] == "true" for r in rows)


def test_conc_rerun_identical(tmp_path):
    args = ["conc", "--z-grid", "0:2:0.1", "--samples", "100000", "--seed", "7"]
    assert run(args + ["--out", str(tmp_path / "a")]) == 0
    assert run(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("tails.csv", "z_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    lines = (tmp_path / "a" / "tails.csv").read_text().splitlines()
    assert lines[0] == "z,empirical,bound,stderr" and len(lines) == 1 + 21 + 9


def test_json_format(tmp_path):
    assert run(["holevo", "--kind", "II", "--d", "4", "--t", "0.3", "--samples", "50", "--format", "json",
                "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "holevo.json").read_text())
    assert {"quantity": "t", "value": 0.3} in data


def test_invalid_parameters(tmp_path, capsys):
    out = tmp_path / "bad"
    assert run(["pack", "--kind", "I", "--d", "6", "--rank", "2", "--out", str(out)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "invalid-parameters" and "3r < d" in err["message"]
    assert not out.exists()


def test_invalid_parameters_keep_existing_files(tmp_path):
    (tmp_path / "keep.txt").write_text("x")
    assert run(["oracle", "--max-n", "9", "--out", str(tmp_path)]) == 2
    assert sorted(p.name for p in tmp_path.iterdir()) == ["keep.txt"]


def test_bad_grid_is_usage_error(tmp_path):
    with pytest.raises(SystemExit):
        run(["conc", "--z-grid", "1:0:0.1", "--out", str(tmp_path)])


def test_pack_and_sample_smoke(tmp_path):
    assert run(["pack", "--kind", "II", "--d", "8", "--t", "0.5", "--samples", "300", "--max-size", "10",
                "--out", str(tmp_path)]) == 0
    assert manifest(tmp_path)["summary"]["size"] == 10
    assert run(["sample", "--n", "10", "--samples", "500", "--delta", "0.1,0.3", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "sample_tail.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 2


def test_bounds_smoke(tmp_path):
    assert run(["bounds", "--max-n", "6", "--d", "3", "--samples", "20", "--out", str(tmp_path)]) == 0
    assert manifest(tmp_path)["summary"]["all_hold"]


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "swtomo", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "oracle" in res.stdout
    res = subprocess.run([sys.executable, "-m", "swtomo", "sample", "--help"], capture_output=True, text=True)
    assert "n, delta, empirical, bound, stderr, holds" in res.stdout
