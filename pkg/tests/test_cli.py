from __future__ import annotations

import json
import os

import pytest

from fracflow.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ml(capsys):
    code, out, _ = run(capsys, "ml", "--alpha", "1", "--beta", "1", "--z", "1")
    assert code == 0
    assert out.splitlines()[1].startswith("1,2.71828182845904")
    code, out, _ = run(capsys, "ml", "--alpha", "0.7", "--beta", "1", "--z", "0")
    assert out.splitlines()[1] == "0,1"


def test_usage_errors(capsys):
    code, _, err = run(capsys, "ml", "--alpah", "1")
    assert code == 2 and "usage" in err
    code, _, _ = run(capsys, "ml", "--alpha", "3", "--z", "1")
    assert code == 2
    code, _, err = run(capsys, "experiment", "nope")
    assert code == 2 and "unknown experiment" in err
    code, _, _ = run(capsys)
    assert code == 2


def test_kernel_rows(capsys):
    code, out, _ = run(capsys, "kernel", "--kind", "Z", "--alpha", "1", "--beta", "2",
                       "--d", "1", "--t", "1", "--r", "0")
    assert code == 0
    assert out.splitlines()[1].startswith("0,0.2820947917738")

    code, out, _ = run(capsys, "kernel", "--kind", "Z", "--alpha", "0.5", "--beta", "1",
                       "--d", "1", "--r", "0,1")
    rows = out.splitlines()[1:]
    assert rows[0] == "0,inf,SINGULAR"
    assert rows[1].endswith(",")

    args = ["--alpha", "1", "--beta", "1.5", "--d", "2", "--r", "0.5,1,2"]
    _, y, _ = run(capsys, "kernel", "--kind", "Y", *args)
    _, z, _ = run(capsys, "kernel", "--kind", "Z", *args)
    assert y == z


def test_foxh(capsys):
    code, out, _ = run(capsys, "foxh", "--spec", "ml", "--alpha", "0.5", "--beta", "1", "--z", "1")
    assert code == 0
    assert out.splitlines()[1].startswith("1,0.42758357615580")


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": 1, "beta": 1, "z": [0, 1]}))
    code, out, _ = run(capsys, "ml", "--config", str(cfg))
    assert code == 0 and len(out.splitlines()) == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "ml", "--config", str(cfg), "--alpha", "1", "--z", "1")[0] == 2
    cfg.write_text("{not json")
    assert run(capsys, "ml", "--config", str(cfg), "--alpha", "1", "--z", "1")[0] == 2


def test_experiment_report_and_reproducibility(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.8, "beta": 2.0, "d": 1}))
    outputs = []
    for sub in ("a", "b"):
        monkeypatch.setenv("FRACFLOW_OUT", str(tmp_path / sub))
        code, out, _ = run(capsys, "experiment", "optimal-l2", str(cfg))
        assert code == 0 and out.startswith("PASS")
        outdir = tmp_path / sub
        outputs.append({f: (outdir / f).read_bytes() for f in sorted(os.listdir(outdir))})
    assert outputs[0] == outputs[1]
    report = json.loads(outputs[0]["optimal_l2.json"])
    assert report["passed"] is True and report["schema_version"] == 1
    assert outputs[0]["optimal_l2_series0.csv"].startswith(b"t,value,p,weak\n")

    cfg.write_text(json.dumps({"no_such_option": 1}))
    assert run(capsys, "experiment", "optimal-l2", str(cfg))[0] == 2


def test_failed_check_exits_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.8, "beta": 2.0, "d": 1, "tolerance": 1e-9}))
    code, out, _ = run(capsys, "experiment", "optimal-l2", str(cfg))
    assert code == 1 and out.startswith("FAIL")


def test_numerical_failure_exits_one(capsys):
    # a tiny periodic box cannot hold the solution at late times
    code, _, err = run(capsys, "solve", "--N", "64", "--L", "2", "--times", "1e6")
    assert code == 1 and "numerical failure" in err


def test_solve_writes_fields(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FRACFLOW_OUT", str(tmp_path))
    code, out, _ = run(capsys, "solve", "--N", "128", "--L", "20", "--times", "1,2",
                       "--gamma", "2")
    assert code == 0
    assert (tmp_path / "solve_u001.csv").exists()
    assert (tmp_path / "solve_norms.csv").read_text().startswith("t,mass,l1,l2,linf")
    assert len(out.splitlines()) == 3
