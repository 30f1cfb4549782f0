import math
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavbuoy.errors import ReferenceInfeasibleError
from uavbuoy.harness import (
    StepRecord,
    check_constraints,
    energy_consumed,
    format_table,
    induced_power,
    initialize,
    read_csv,
    run,
    write_csv,
    write_outputs,
    write_summary,
)
from uavbuoy.params import Parameters
from uavbuoy.scenario import builtin_scenario, scenario_from_dict
from uavbuoy.waves import surface_current, wave_particle_velocity

P = Parameters()
GOLDEN = Path(__file__).parent / "golden" / "c1_fsvc_5s.csv"


def test_initialize_flat_sea():
    s = initialize(builtin_scenario("c1"))
    assert (s.x_b, s.V, s.z_b_dot) == (0.0, 0.0, 0.0)
    assert s.z_b == pytest.approx(P.h_b / 4, abs=1e-15)
    assert s.z_b == pytest.approx(0.0625)
    assert s.alpha == pytest.approx(math.pi / 4)
    assert s.theta_u == 0.0 and s.theta_u_dot == 0.0


def test_initialize_moves_with_the_water():
    sc = builtin_scenario("c2")
    s = initialize(sc)
    vx, _ = wave_particle_velocity(sc.sea, 0.0, min(s.z_b, 0.0), 0.0)
    assert s.V == pytest.approx(surface_current(sc.sea) + vx, abs=1e-15)
    assert s.z_b_dot == pytest.approx(2 * math.pi / 5.7 * 0.75 - 2 * math.pi / 3.0 * 0.135, abs=1e-12)
    assert s.z_b_dot == pytest.approx(0.5441, abs=2e-4)
    rest = initialize(builtin_scenario("c2").with_(initial="rest"))
    assert (rest.V, rest.z_b_dot) == (0.0, 0.0)


def test_nominal_height_matches_nominal_elevation():
    assert P.h_b / 4 + P.l * math.sin(math.pi / 4) == pytest.approx(5.0, abs=0.02)


def test_initialize_rejects_unreachable_height():
    sc = scenario_from_dict({"reference": {"uav_height_m": 9.0}})
    with pytest.raises(ReferenceInfeasibleError):
        initialize(sc)


def test_constraint_examples():
    a = math.pi / 4
    assert check_constraints(-1.0, a, 0.01, P) == (False, True, True)
    limit = (P.m_b + P.m_c) * P.g / math.sin(a)
    assert limit == pytest.approx(13 * 9.81 * math.sqrt(2), rel=1e-12)
    assert limit == pytest.approx(180.36, abs=1e-2)  # exact value 180.3547
    assert check_constraints(limit, a, 0.01, P)[1] is False
    assert check_constraints(limit - 1e-9, a, 0.01, P)[1] is True
    assert check_constraints(10.0, a, 0.0, P) == (True, True, False)


@given(st.floats(-50, 250), st.floats(0.01, 1.56), st.floats(0.0, 0.05))
def test_constraint_predicates(tension, alpha, v_im):
    taut, no_hang, no_fly = check_constraints(tension, alpha, v_im, P)
    assert taut == (tension > 0)
    assert no_hang == (tension * math.sin(alpha) < (P.m_b + P.m_c) * P.g)
    assert no_fly == (v_im > 0)


def test_energy_examples():
    assert energy_consumed([0.0] * 100, 0.005, P) == 0.0
    assert induced_power(17.66, P) == pytest.approx(17.66**1.5 / math.sqrt(2 * 1.225 * 0.3), rel=1e-12)
    assert induced_power(17.66, P) == pytest.approx(86.6, abs=0.05)
    assert energy_consumed([17.66] * 2000, 0.005, P) == pytest.approx(0.866, abs=5e-4)
    with pytest.raises(ValueError):
        energy_consumed([1.0, -1.0], 0.005, P)


def short_run(name="c1", controller="fsvc", duration=5.0):
    return run(builtin_scenario(name).with_(duration=duration, controller=controller))


def test_run_produces_one_record_per_control_period():
    r = short_run(duration=1.0)
    assert len(r.records) == 201
    ts = [x.t for x in r.records]
    assert ts[0] == 0.0 and ts[-1] == pytest.approx(1.0)
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert r.summary.error is None
    assert any("Stokes" in line for line in r.summary.assumptions)
    assert any("theta_bar" in line for line in r.summary.assumptions)


@pytest.mark.parametrize("name,controller", [("c1", "fsvc"), ("c2", "pid")])
def test_actuator_commands_stay_in_range(name, controller):
    r = short_run(name, controller, 5.0)
    for x in r.records:
        assert 0.0 <= x.u1 <= P.u1_max
        assert abs(x.theta_c) < P.theta_um
        assert x.power >= 0.0


def test_csv_is_deterministic(tmp_path):
    a = write_csv(short_run(duration=2.0).records, tmp_path / "a.csv").read_bytes()
    b = write_csv(short_run(duration=2.0).records, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_csv_round_trip(tmp_path):
    records = short_run("c2", "pid", 1.0).records
    back = read_csv(write_csv(records, tmp_path / "x.csv"))
    # PID runs have no tension estimate or elevation reference; those columns are NaN
    np.testing.assert_array_equal(np.array(back, dtype=float), np.array(records, dtype=float))
    assert (tmp_path / "x.csv").read_text().splitlines()[0].split(",") == list(StepRecord._fields)


def test_golden_short_run():
    records = short_run().records
    if os.environ.get("UAVBUOY_REGEN_GOLDEN"):
        write_csv(records, GOLDEN)
    golden = read_csv(GOLDEN)
    assert len(golden) == len(records)
    got = np.array([[float(v) for v in r] for r in records])
    want = np.array([[float(v) for v in r] for r in golden])
    np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)


def test_outputs_and_summary_table(tmp_path):
    result = short_run(duration=1.0)
    paths = write_outputs(result, tmp_path)
    assert paths["csv"].name == "C1_fsvc.csv" and paths["assumptions"].name == "C1_assumptions.txt"
    assert "error" not in paths
    text = write_summary("C1", {"fsvc": result.summary}, tmp_path).read_text()
    assert text.startswith("Comparison of tracking errors and consumed energy")
    assert "C1" in text and "fsvc taut violated" in text
    row = format_table([("C1", {"fsvc": result.summary})]).splitlines()[-1]
    assert f"{result.summary.energy_kj:.1f}" in row and "-" in row


def test_summary_means_are_full_run_averages():
    r = short_run(duration=2.0)
    ev = np.mean([abs(x.e_V) for x in r.records]) * 100
    ez = np.mean([abs(x.e_zu) for x in r.records]) * 100
    assert r.summary.mean_abs_e_v_cm_s == pytest.approx(ev, rel=1e-12)
    assert r.summary.mean_abs_e_zu_cm == pytest.approx(ez, rel=1e-12)
    assert r.summary.energy_kj == pytest.approx(sum(x.power for x in r.records[:-1]) * 0.005 / 1000, rel=1e-12)


def test_violation_intervals_are_closed_and_ordered():
    r = short_run("c2", "pid", 5.0)
    for ivs in r.summary.violations.values():
        for a, b in ivs:
            assert a <= b
        assert all(ivs[i][1] < ivs[i + 1][0] for i in range(len(ivs) - 1))
    flagged = [x.t for x in r.records if not x.taut]
    covered = [t for t in flagged if any(a <= t <= b for a, b in r.summary.violations["taut"])]
    assert flagged == covered


def test_fatal_dynamics_error_keeps_partial_records(monkeypatch, tmp_path):
    from uavbuoy import dynamics

    calls = {"n": 0}
    real = dynamics.CoupledModel.rk4

    def flaky(self, t, y, u1, u2, dt):
        calls["n"] += 1
        out = real(self, t, y, u1, u2, dt)
        return tuple(float("nan") for _ in out) if calls["n"] > 50 else out

    monkeypatch.setattr(dynamics.CoupledModel, "rk4", flaky)
    result = short_run(duration=1.0)
    assert result.summary.error
    assert result.summary.error_state is not None
    assert 0 < len(result.records) < 201
    paths = write_outputs(result, tmp_path)
    assert paths["error"].exists()
