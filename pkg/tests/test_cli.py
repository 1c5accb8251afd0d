import csv

import pytest

from fastgrant.cli import main
from fastgrant.experiments import EXPERIMENTS

SMALL = ["--set", "n_devices=60", "--set", "n_rbs=4", "--set", "n_cycles=120", "--no-figures", "-q"]


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in EXPERIMENTS:
        assert name in out


def test_validate_ok(tmp_path, capsys):
    p = tmp_path / "ok.cfg"
    p.write_text("n_rbs = 8\n")
    assert main(["validate", "--config", str(p)]) == 0


def test_validate_bad_deltas(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("delta_weights = 0.2, 0.3, 0.4\n")
    assert main(["validate", "--config", str(p)]) == 3
    assert "delta_weights" in capsys.readouterr().err


def test_unknown_experiment(tmp_path, capsys):
    assert main(["run", "nope", "--out", str(tmp_path)]) == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_bad_override(tmp_path):
    assert main(["run", "table2", "--out", str(tmp_path), "--set", "rho"]) == 3


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_table2_summary_rows(tmp_path):
    assert main(["run", "table2", "--seed", "7", "--reps", "2", "--out", str(tmp_path), *SMALL]) == 0
    out = tmp_path / "table2"
    rows = _read(out / "summary.csv")
    assert [r["system"] for r in rows] == ["oma-mab", "noma-mab"]
    assert all(r["replications"] == "2" for r in rows)
    for name in ("oma-mab_reward.csv", "noma-mab_waste.csv", "oma-mab_histogram.csv", "manifest.ini"):
        assert (out / name).exists()


def _csvs(d):
    return {p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))}


def test_same_seed_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["run", "table2", "--seed", "11", "--out", str(d), *SMALL]) == 0
    assert _csvs(a / "table2") == _csvs(b / "table2")


def test_manifest_reproduces_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "mode-switch", "--seed", "4", "--out", str(a), *SMALL]) == 0
    assert main(["reproduce", str(a / "mode-switch" / "manifest.ini"), "--out", str(b), "--no-figures"]) == 0
    assert _csvs(a / "mode-switch") == _csvs(b / "mode-switch")


def test_sweep_writes_one_set_per_error(tmp_path):
    assert main(["run", "pred-error-sweep", "--out", str(tmp_path), *SMALL]) == 0
    names = {p.name for p in (tmp_path / "pred-error-sweep").glob("*.csv")}
    for err in ("0.01", "0.1", "0.4"):
        assert f"oma-mab-ep{err}_waste.csv" in names


@pytest.mark.slow
def test_figures_rendered(tmp_path):
    args = [a for a in SMALL if a != "--no-figures"]
    assert main(["run", "reward-curves", "--out", str(tmp_path), *args]) == 0
    assert list((tmp_path / "reward-curves").glob("*.png"))
