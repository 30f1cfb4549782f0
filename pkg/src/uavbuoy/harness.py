"""Run orchestration: initial conditions, control/physics loop, constraints, metrics, outputs."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from uavbuoy.control import Measurement
from uavbuoy.dynamics import Accelerations, CoupledModel, SystemState
from uavbuoy.errors import ModelError, ReferenceInfeasibleError
from uavbuoy.fsvc import FsvcController
from uavbuoy.pid import PidController
from uavbuoy.scenario import Scenario, reference_profile
from uavbuoy.waves import stokes_drift, surface_current, surface_elevation, wave_particle_velocity

CSV_SCHEMA_VERSION = 1


class StepRecord(NamedTuple):
    t: float
    x_b: float
    z_b: float
    V: float
    z_b_dot: float
    alpha: float
    alpha_dot: float
    theta_u: float
    theta_b: float
    x_u: float
    z_u: float
    u1: float
    u2: float
    u_T: float
    u_alpha: float
    theta_c_raw: float
    theta_c: float
    T: float
    T_hat: float
    v_im_ratio: float
    U_cr: float
    vx_w: float
    vz_w: float
    zeta: float
    V_ref: float
    z_u_ref: float
    alpha_ref: float
    e_V: float
    e_zu: float
    taut: bool
    no_hang: bool
    no_flyover: bool
    power: float


@dataclass
class RunSummary:
    scenario: str
    controller: str
    mean_abs_e_v_cm_s: float
    mean_abs_e_zu_cm: float
    energy_kj: float
    violations: dict  # constraint name -> list of [t_start, t_end]
    assumptions: list
    stokes_drift_m_s: float
    error: str | None = None
    error_state: dict | None = None

    def violations_after(self, name: str, t_min: float) -> list:
        return [iv for iv in self.violations[name] if iv[1] > t_min]


@dataclass
class RunResult:
    scenario: Scenario
    records: list = field(default_factory=list)
    summary: RunSummary | None = None


def initialize(scenario: Scenario) -> SystemState:
    """Buoy floating at quarter draft on the local surface, moving with the water at t = 0."""
    p = scenario.params
    sea = scenario.sea
    x_b = 0.0
    z_b = surface_elevation(sea, x_b, 0.0) + p.h_b / 4.0
    if scenario.initial == "water_velocity":
        vx, vz = wave_particle_velocity(sea, x_b, min(z_b, 0.0), 0.0)
        v = surface_current(sea) + vx
    else:
        v = vz = 0.0
    _, z_ref = reference_profile(scenario, 0.0)
    if abs(z_ref - z_b) > p.l:
        raise ReferenceInfeasibleError(f"UAV height {z_ref} m unreachable at t=0 from buoy height {z_b:.3f} m")
    return SystemState(x_b=x_b, z_b=z_b, V=v, z_b_dot=vz, alpha=scenario.nominal_elevation, t=0.0)


def check_constraints(tension: float, alpha: float, v_im: float, params) -> tuple[bool, bool, bool]:
    """(taut, no-hang, no-fly-over); True means the constraint holds."""
    taut = tension > 0.0
    sa = math.sin(alpha)
    if sa > 0.0:
        no_hang = tension < (params.m_b + params.m_c) * params.g / sa
    else:
        no_hang = True
    return taut, no_hang, v_im > 0.0


def induced_power(u1: float, params) -> float:
    """Momentum-theory induced power of a rotor disk producing thrust u1, in W."""
    return max(u1, 0.0) ** 1.5 / math.sqrt(2.0 * params.rho_air * params.disk_area)


def energy_consumed(u1_series, dt_control: float, params) -> float:
    """Total energy in kJ for thrust samples held over ``dt_control`` each."""
    if any(u < 0 for u in u1_series):
        raise ValueError("thrust samples must be non-negative")
    return sum(induced_power(u, params) for u in u1_series) * dt_control / 1000.0


def make_controller(scenario: Scenario):
    if scenario.controller == "fsvc":
        return FsvcController(scenario.params, scenario.fsvc, scenario.dt_control)
    return PidController(scenario.params, scenario.pid, scenario.dt_control)


def assumption_log(scenario: Scenario) -> list:
    p = scenario.params
    lines = [
        f"csv schema version: {CSV_SCHEMA_VERSION}",
        f"buoy width {p.width:.4f} m ({'configured' if p.w_b is not None else 'derived from quarter immersion'})",
        "wetted area A_wt = 4 l_b * draft (linear in draft, 4 l_b h_b when submerged)",
        "immersion measured vertically at the buoy centre, buoy tilt ignored",
        f"Stokes drift U_s = sum d w k A^2 = {stokes_drift(scenario.sea):.5f} m/s",
        "wave velocities evaluated at depth min(z_b, 0)",
        f"energy: induced-power surrogate u1^1.5 / sqrt(2 rho_air A_disk), A_disk = {p.disk_area} m^2 (ratio use only)",
        f"thrust limit u1_max = {p.thrust_to_weight} m_u g = {p.u1_max:.2f} N",
        "tension estimate uses the accelerations under the previous command (one-sample delay)",
        "PID thrust map uses UAV mass m_u",
        f"integration: RK4 dt = {scenario.dt_physics} s, control ZOH dt = {scenario.dt_control} s",
    ]
    if scenario.controller == "fsvc":
        g = scenario.fsvc.gains
        lines.append(
            f"FSVC backstepping root k_alpha1 = {g.k_alpha1}, k_alpha2 = {g.k_alpha2}, gamma_alpha = {g.gamma_alpha}"
            f" -> k_alpha = [{g.k_p_alpha:g}, {g.k_i_alpha:g}, {g.k_d_alpha:g}]"
        )
        if scenario.fsvc.exact_tension:
            lines.append("FSVC tension feed-forward solved exactly at each sample (oracle mode)")
    att = scenario.fsvc.attitude if scenario.controller == "fsvc" else scenario.pid.attitude
    scale = att.theta_scale if att.theta_scale is not None else p.theta_um
    lines.append(f"pitch smoothing scale theta_bar = {scale:.4f} rad")
    return lines


def _intervals(times, flags) -> list:
    out = []
    start = None
    prev_t = None
    for t, ok in zip(times, flags):
        if not ok and start is None:
            start = t
        elif ok and start is not None:
            out.append([start, prev_t])
            start = None
        prev_t = t
    if start is not None:
        out.append([start, prev_t])
    return out


def summarize(scenario: Scenario, records: list, error: ModelError | None = None) -> RunSummary:
    n = len(records)
    if n:
        mean_ev = sum(abs(r.e_V) for r in records) / n * 100.0
        mean_ez = sum(abs(r.e_zu) for r in records) / n * 100.0
    else:
        mean_ev = mean_ez = float("nan")
    # the final record is the terminal state; its command is never applied
    energy = energy_consumed([r.u1 for r in records[:-1]], scenario.dt_control, scenario.params)
    times = [r.t for r in records]
    violations = {
        "taut": _intervals(times, [r.taut for r in records]),
        "no_hang": _intervals(times, [r.no_hang for r in records]),
        "no_flyover": _intervals(times, [r.no_flyover for r in records]),
    }
    return RunSummary(
        scenario.name,
        scenario.controller,
        mean_ev,
        mean_ez,
        energy,
        violations,
        assumption_log(scenario),
        stokes_drift(scenario.sea),
        str(error) if error else None,
        error.state if error else None,
    )


def run(scenario: Scenario, controller=None) -> RunResult:
    """Simulate one scenario. Deterministic: same scenario, same records."""
    p = scenario.params
    model = CoupledModel(p, scenario.sea)
    ctrl = controller or make_controller(scenario)
    state = initialize(scenario)
    ctrl.reset()
    result = RunResult(scenario)
    records = result.records
    dt_c, dt_p, n_sub = scenario.dt_control, scenario.dt_physics, scenario.substeps
    u1_prev = u2_prev = None
    v_b = p.volume
    error = None
    try:
        for k in range(scenario.n_control + 1):
            t = k * dt_c
            state.t = t
            env = model.environment_for(state)
            prev_acc = Accelerations() if u1_prev is None else model.accelerations(state, u1_prev, u2_prev, env)
            v_ref0, z_ref = reference_profile(scenario, t)

            def tension_at(u1, _state=state, _env=env):
                return model.tension(_state, model.accelerations(_state, u1, 0.0, _env), _env)

            meas = Measurement(t, state, env, prev_acc, v_ref0, z_ref, dt_c, tension_at)
            cmd = ctrl.update(meas)
            acc = model.accelerations(state, cmd.u1, cmd.u2, env)
            ca = math.cos(state.alpha)
            tension = model.tension(state, acc, env) if abs(ca) >= 1e-6 else float("nan")
            x_u, z_u = state.uav_position(p.l)
            taut, no_hang, no_fly = check_constraints(tension, state.alpha, env.v_im, p)
            records.append(
                StepRecord(
                    t, state.x_b, state.z_b, state.V, state.z_b_dot, state.alpha, state.alpha_dot,
                    state.theta_u, env.theta_b, x_u, z_u,
                    cmd.u1, cmd.u2, cmd.u_T, cmd.u_alpha, cmd.theta_c_raw, cmd.theta_c,
                    tension, cmd.tension_estimate, env.v_im / v_b, env.u_cr, env.vx, env.vz, env.zeta,
                    cmd.v_ref, z_ref, cmd.alpha_ref, state.V - cmd.v_ref, z_ref - z_u,
                    taut, no_hang, no_fly,
                    induced_power(cmd.u1, p),
                )
            )
            if k == scenario.n_control:
                break
            u1_prev, u2_prev = cmd.u1, cmd.u2
            y = state.vector()
            tt = t
            for j in range(n_sub):
                y = model.rk4(tt, y, cmd.u1, cmd.u2, dt_p)
                tt = t + (j + 1) * dt_p
            if not all(math.isfinite(v) for v in y):
                raise ModelError(f"non-finite state after t={t:.4f}", state.as_dict())
            state = SystemState.from_vector(y, (k + 1) * dt_c)
    except ModelError as exc:
        error = exc
        if exc.state is None:
            exc.state = state.as_dict()
    result.summary = summarize(scenario, records, error)
    return result


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    return repr(float(v))


def write_csv(records: list, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(StepRecord._fields)
        for r in records:
            w.writerow([_fmt(v) for v in r])
    return path


def read_csv(path) -> list:
    """Read a StepRecord CSV back (used by regression tests and external tooling)."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header = tuple(rows[0])
    if header != StepRecord._fields:
        raise ValueError(f"unexpected CSV columns in {path}")
    bool_cols = {"taut", "no_hang", "no_flyover"}
    out = []
    for row in rows[1:]:
        out.append(StepRecord(*[(v == "1") if h in bool_cols else float(v) for h, v in zip(header, row)]))
    return out


def format_table(rows: list) -> str:
    """Comparison table: one row per scenario, PID and FSVC side by side.

    ``rows`` is a list of (scenario_name, {controller: RunSummary}).
    """

    def group(a, b):
        return f" {a:>8} {b:>9} "

    def cell(summary, attr):
        return f"{getattr(summary, attr):.1f}" if summary is not None else "-"

    lines = [
        "Comparison of tracking errors and consumed energy",
        f"{'Case':<8}|{'V mean err (cm/s)':^20}|{'z_u mean err (cm)':^20}|{'Energy (kJ)':^20}",
        f"{'':<8}|" + "|".join([group("PID", "FSVC")] * 3),
        "-" * 70,
    ]
    for name, by_ctrl in rows:
        pid, fsvc = by_ctrl.get("pid"), by_ctrl.get("fsvc")
        groups = [group(cell(pid, a), cell(fsvc, a)) for a in ("mean_abs_e_v_cm_s", "mean_abs_e_zu_cm", "energy_kj")]
        lines.append(f"{name:<8}|" + "|".join(groups))
    return "\n".join(lines) + "\n"


def write_outputs(result: RunResult, out_dir) -> dict:
    """Write ``<name>_<controller>.csv`` plus assumptions (and an error record on failure)."""
    out_dir = Path(out_dir)
    s = result.summary
    base = f"{result.scenario.name}_{s.controller}"
    paths = {"csv": write_csv(result.records, out_dir / f"{base}.csv")}
    assumptions = out_dir / f"{result.scenario.name}_assumptions.txt"
    assumptions.write_text("\n".join(s.assumptions) + "\n")
    paths["assumptions"] = assumptions
    if s.error:
        err = out_dir / f"{base}_error.json"
        err.write_text(json.dumps({"error": s.error, "state": s.error_state}, indent=2, sort_keys=True) + "\n")
        paths["error"] = err
    return paths


def write_summary(name: str, summaries: dict, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text = format_table([(name, summaries)])
    for ctrl, s in sorted(summaries.items()):
        for cname, ivs in s.violations.items():
            if ivs:
                spans = ", ".join(f"[{a:.3f}, {b:.3f}]" for a, b in ivs)
                text += f"{ctrl} {cname} violated: {spans}\n"
    path = out_dir / f"{name}_summary.txt"
    path.write_text(text)
    return path
