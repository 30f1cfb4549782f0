import subprocess
import sys
from importlib import resources

import pytest

from uavbuoy.cli import main


@pytest.fixture
def short_c1(tmp_path):
    src = resources.files("uavbuoy.scenarios").joinpath("c1.toml").read_text()
    path = tmp_path / "scen" / "c1.toml"
    path.parent.mkdir()
    path.write_text(src.replace("duration_s = 60.0", "duration_s = 0.5"))
    return path


def test_simulate_writes_outputs(short_c1, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", str(short_c1), "--controller", "pid", "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"C1_pid.csv", "C1_summary.txt", "C1_assumptions.txt"}
    assert len((out / "C1_pid.csv").read_text().splitlines()) == 102
    assert "Comparison of tracking errors" in capsys.readouterr().out


def test_simulate_overrides(short_c1, tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", str(short_c1), "--out", str(out), "--duration", "0.2", "--dt", "0.0005"]) == 0
    assert len((out / "C1_fsvc.csv").read_text().splitlines()) == 42


def test_compare_and_sweep(short_c1, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["compare", str(short_c1), "--out", str(out)]) == 0
    assert (out / "C1_pid.csv").exists() and (out / "C1_fsvc.csv").exists()
    capsys.readouterr()
    assert main(["sweep", str(short_c1.parent), "--out", str(tmp_path / "sweep")]) == 0
    table = capsys.readouterr().out
    assert table.count("C1") == 1


def test_config_errors_exit_2(tmp_path, short_c1):
    assert main(["simulate", str(tmp_path / "nope.toml")]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("duraton_s = 1.0\n")
    assert main(["simulate", str(bad)]) == 2
    assert main(["simulate", str(short_c1), "--dt", "0.003"]) == 2
    assert main(["sweep", str(tmp_path / "empty")]) == 2


def test_dynamics_error_exits_3(short_c1, tmp_path, monkeypatch):
    from uavbuoy import dynamics

    def broken(self, t, y, u1, u2, dt):
        return tuple(float("nan") for _ in y)

    monkeypatch.setattr(dynamics.CoupledModel, "rk4", broken)
    out = tmp_path / "out"
    assert main(["simulate", str(short_c1), "--out", str(out)]) == 3
    assert (out / "C1_fsvc_error.json").exists()
    assert (out / "C1_fsvc.csv").exists()


def test_console_entry_point(short_c1, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "uavbuoy.cli", "simulate", str(short_c1), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "C1" in proc.stdout
