import json
import subprocess
import sys

import numpy as np
import pytest

from anisotex.cli import main
from anisotex.grid import read_pgm, read_raw


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_synth_elementary_tb(tmp_path, capsys):
    out = tmp_path / "e.raw"
    code, stdout, _ = run(["synth", "elementary", "--hurst", "0.3", "--alpha0", "0.5",
                           "--r", "32", "--epsilon", "0.05", "--seed", "3", "--out", str(out)],
                          capsys)
    assert code == 0
    record = json.loads(stdout)
    assert record["backend"] == "tb" and record["r"] == 32
    assert {"plan", "lines", "assembly", "total"} <= set(record["timings"])
    values = read_raw(out)
    assert values.shape == (33, 33) and values[0, 0] == 0.0
    assert read_pgm(tmp_path / "e.pgm").shape == (33, 33)


def test_synth_lafbf_reproducible(tmp_path, capsys):
    args = ["synth", "lafbf", "--hurst", "0.2", "--orient", "v2", "--window", "gauss",
            "--r", "40", "--epsilon", "0.05", "--seed", "8"]
    run(args + ["--out", str(tmp_path / "a.raw"), "--threads", "1"], capsys)
    run(args + ["--out", str(tmp_path / "b.raw"), "--threads", "3"], capsys)
    assert (tmp_path / "a.raw").read_bytes() == (tmp_path / "b.raw").read_bytes()
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()


def test_synth_cholesky(tmp_path, capsys):
    out = tmp_path / "c.raw"
    code, stdout, _ = run(["synth", "lafbf", "--backend", "cholesky", "--hurst", "0.4",
                           "--orient", "v1", "--r", "6", "--out", str(out)], capsys)
    assert code == 0 and json.loads(stdout)["backend"] == "cholesky"
    assert read_raw(out).shape == (7, 7)


def test_cholesky_guard(tmp_path, capsys):
    out = tmp_path / "g.raw"
    code, _, err = run(["synth", "elementary", "--backend", "cholesky", "--hurst", "0.2",
                        "--alpha0", "0.5", "--r", "255", "--out", str(out)], capsys)
    assert code == 2 and "--force-cholesky" in err
    assert not out.exists()


def test_bad_parameters(tmp_path, capsys):
    code, _, err = run(["synth", "elementary", "--hurst", "1.2", "--alpha0", "0",
                        "--r", "8", "--out", str(tmp_path / "x.raw")], capsys)
    assert code == 2 and "hurst" in err
    code, _, _ = run(["synth", "lafbf", "--hurst", "0.5", "--orient", "spiral",
                      "--r", "8", "--out", str(tmp_path / "x.raw")], capsys)
    assert code == 2


def test_validate_covariance(capsys):
    code, stdout, _ = run(["validate", "--suite", "covariance", "--r", "6", "--samples", "400"],
                          capsys)
    report = json.loads(stdout)
    assert report["suite"] == "covariance"
    assert {"metric", "value", "expected", "tolerance", "pass"} == set(report["checks"][0])
    assert code == (0 if report["pass"] else 1)


def test_validate_orientation_local(capsys):
    code, stdout, _ = run(["validate", "--suite", "orientation", "--orient", "v2"], capsys)
    report = json.loads(stdout)
    assert code == 0 and report["pass"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "anisotex", "--help"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and "synth" in proc.stdout


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
