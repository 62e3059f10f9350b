import csv

import numpy as np
import pytest

from mlswe.cli import main


def test_run_subcommand_writes_outputs(tmp_path, capsys):
    out = tmp_path / "iw"
    rc = main(["run", "internal_wave", "--dt", "0.04", "--t-final", "0.2",
               "--output-interval", "0.2", "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "verdict=completed" in text
    snaps = sorted(out.glob("snapshot_*.csv"))
    assert len(snaps) == 2
    assert (out / "report.ini").exists() and (out / "case.ini").exists()


def test_run_subcommand_reports_instability(tmp_path, capsys):
    rc = main(["run", "internal_wave", "--dt", "0.2", "--t-final", "4.0",
               "--out", str(tmp_path / "bad")])
    assert rc == 2
    assert "verdict=unstable" in capsys.readouterr().out


def test_spectrum_subcommand(tmp_path):
    profile = tmp_path / "profile.ini"
    profile.write_text(
        "[profile]\nh = 1.0\ng = 9.81\nu = 0.2, 0.2\nrho = 0.0, 0.0\n"
        "l = 0.5, 0.5\n")
    out = tmp_path / "spec.csv"
    rc = main(["analyze", "spectrum", str(profile), "--out", str(out)])
    assert rc == 0
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["profile", "re_lambda", "im_lambda"]
    lam = np.array([complex(float(r[1]), float(r[2])) for r in rows[1:]])
    assert lam.size == 5
    c = np.sqrt(9.81)
    expected = np.sort([0.2 - c, 0.2, 0.2, 0.2, 0.2 + c])
    assert np.allclose(np.sort(lam.real), expected, atol=1e-10)
    assert np.allclose(lam.imag, 0.0, atol=1e-12)


def test_sweep_subcommand(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main(["analyze", "sweep", "--contrast-max", "4.0", "--points", "9",
               "--out", str(out)])
    assert rc == 0
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["shear", "max_im_lambda"]
    assert len(rows) == 10
    shear = [float(r[0]) for r in rows[1:]]
    assert shear[0] == 0.0 and shear[-1] == 4.0


def test_compare_subcommand(tmp_path, capsys):
    out = tmp_path / "ref"
    assert main(["run", "internal_wave", "--dt", "0.04", "--t-final", "0.08",
                 "--output-interval", "0.04", "--out", str(out)]) == 0
    capsys.readouterr()
    rc = main(["compare", str(out), str(out)])
    assert rc == 0
    rows = list(csv.reader(capsys.readouterr().out.strip().splitlines()))
    assert rows[0] == ["t", "field", "rel_l2", "rel_linf"]
    fields = {r[1] for r in rows[1:]}
    assert fields == {"eta", "rho", "u"}
    assert all(float(r[2]) == 0.0 and float(r[3]) == 0.0 for r in rows[1:])


def test_error_exit_code(tmp_path, capsys):
    rc = main(["analyze", "spectrum", str(tmp_path / "nosuch.ini")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_case_rejected():
    with pytest.raises(SystemExit):
        main(["run", "nosuch_case"])
