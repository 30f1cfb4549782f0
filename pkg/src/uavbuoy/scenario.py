"""Scenario files: TOML with explicit units in key names; unknown keys are errors."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from uavbuoy.control import AttitudeSettings
from uavbuoy.errors import ConfigError
from uavbuoy.fsvc import FsvcGains, FsvcSettings
from uavbuoy.params import Parameters
from uavbuoy.pid import PidSettings
from uavbuoy.waves import WaveComponent, WaveField

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PARAM_KEYS = {
    "buoy_length_m": "l_b",
    "buoy_height_m": "h_b",
    "buoy_width_m": "w_b",
    "buoy_mass_kg": "m_b",
    "added_mass_surge_kg": "a11",
    "added_mass_heave_kg": "a33",
    "damping_surge_ns_per_m": "b11",
    "damping_heave_ns_per_m": "b33",
    "skin_coeff_surge": "c_s1",
    "skin_coeff_heave": "c_s2",
    "uav_mass_kg": "m_u",
    "uav_inertia_kg_m2": "j_u",
    "pitch_limit_rad": "theta_um",
    "cable_length_m": "l",
    "cable_mass_kg": "m_c",
    "ref_filter_tau_s": "tau_f",
    "gravity_m_s2": "g",
    "water_density_kg_m3": "rho_w",
    "air_density_kg_m3": "rho_air",
    "rotor_disk_area_m2": "disk_area",
    "thrust_to_weight": "thrust_to_weight",
    "buoy_force_bias_n": "buoy_force_bias",
}

CONTROLLERS = ("fsvc", "pid")
INITIAL_MODES = ("water_velocity", "rest")


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant setpoint: value of the last breakpoint with t_s <= t."""

    breakpoints: tuple  # ((t_s, value), ...) sorted, first at t = 0

    def __post_init__(self):
        if not self.breakpoints:
            raise ConfigError("a setpoint schedule needs at least one breakpoint")
        times = [t for t, _ in self.breakpoints]
        if times[0] != 0.0:
            raise ConfigError("setpoint schedules must start at t_s = 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("setpoint schedule times must be strictly increasing")

    def __call__(self, t: float) -> float:
        value = self.breakpoints[0][1]
        for t_s, v in self.breakpoints:
            if t >= t_s:
                value = v
            else:
                break
        return value


@dataclass(frozen=True)
class Scenario:
    name: str = "scenario"
    duration: float = 60.0
    dt_physics: float = 1e-3
    dt_control: float = 5e-3
    sea: WaveField = field(default_factory=WaveField.calm)
    params: Parameters = field(default_factory=Parameters)
    controller: str = "fsvc"
    fsvc: FsvcSettings = field(default_factory=FsvcSettings)
    pid: PidSettings = field(default_factory=PidSettings)
    velocity: Schedule | None = None  # None -> 5 m/s then 3 m/s from duration/2
    height: Schedule = field(default_factory=lambda: Schedule(((0.0, 5.0),)))
    nominal_elevation: float = math.pi / 4
    initial: str = "water_velocity"

    def __post_init__(self):
        if not self.duration > 0:
            raise ConfigError("duration must be positive")
        if not (self.dt_physics > 0 and self.dt_control > 0):
            raise ConfigError("time steps must be positive")
        ratio = self.dt_control / self.dt_physics
        if ratio < 1 - 1e-12 or abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError("dt_control must be an integer multiple of dt_physics")
        steps = self.duration / self.dt_control
        if abs(steps - round(steps)) > 1e-9:
            raise ConfigError("duration must be an integer multiple of dt_control")
        if self.controller not in CONTROLLERS:
            raise ConfigError(f"controller must be one of {CONTROLLERS}")
        if self.initial not in INITIAL_MODES:
            raise ConfigError(f"initial mode must be one of {INITIAL_MODES}")
        if not 0 < self.nominal_elevation < math.pi / 2:
            raise ConfigError("nominal elevation must lie in (0, 90) degrees")
        if self.sea.g != self.params.g:
            raise ConfigError("sea state and parameters disagree on gravity")

    @property
    def substeps(self) -> int:
        return int(round(self.dt_control / self.dt_physics))

    @property
    def n_control(self) -> int:
        return int(round(self.duration / self.dt_control))

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


def reference_profile(scenario: Scenario, t: float) -> tuple[float, float]:
    """Raw setpoints (V_ref0 in m/s, UAV height in m) at time ``t``."""
    if scenario.velocity is None:
        v = 5.0 if t < scenario.duration / 2 else 3.0
    else:
        v = scenario.velocity(t)
    return v, scenario.height(t)


def _take(table: dict, allowed: set, where: str) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"[{where}] must be a table")
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(sorted(unknown))}")
    return table


def _schedule(entries, value_key: str, where: str) -> Schedule:
    if not isinstance(entries, list):
        raise ConfigError(f"{where} must be a list of tables")
    points = []
    for e in entries:
        _take(e, {"t_s", value_key}, where)
        if "t_s" not in e or value_key not in e:
            raise ConfigError(f"{where} entries need t_s and {value_key}")
        points.append((float(e["t_s"]), float(e[value_key])))
    return Schedule(tuple(points))


def _wave(entry: dict, g: float) -> WaveComponent:
    _take(entry, {"amplitude_m", "period_s", "omega_rad_s", "direction", "phase_rad"}, "sea.waves")
    if ("period_s" in entry) == ("omega_rad_s" in entry):
        raise ConfigError("each wave needs exactly one of period_s or omega_rad_s")
    if "amplitude_m" not in entry:
        raise ConfigError("each wave needs amplitude_m")
    omega = entry["omega_rad_s"] if "omega_rad_s" in entry else 2.0 * math.pi / entry["period_s"]
    try:
        return WaveComponent(
            float(entry["amplitude_m"]), float(omega), int(entry.get("direction", 1)), float(entry.get("phase_rad", 0.0)), g
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _gain_triplet(value, where):
    if not (isinstance(value, list) and len(value) == 3):
        raise ConfigError(f"{where} must be a list [k_P, k_I, k_D]")
    return tuple(float(v) for v in value)


def scenario_from_dict(data: dict, source: str = "<dict>") -> Scenario:
    top = _take(
        data,
        {"name", "duration_s", "dt_physics_s", "dt_control_s", "initial", "sea", "params", "reference", "controller"},
        "top level",
    )
    ctl = _take(top.get("controller", {}), {"type", "fsvc", "pid", "attitude"}, "controller")
    try:
        overrides = {PARAM_KEYS[k]: v for k, v in _take(top.get("params", {}), set(PARAM_KEYS), "params").items()}
        params = Parameters(**overrides)

        sea_t = _take(top.get("sea", {}), {"lumped_current_m_s", "waves"}, "sea")
        waves = tuple(_wave(w, params.g) for w in sea_t.get("waves", []))
        sea = WaveField(waves, float(sea_t.get("lumped_current_m_s", 0.0)), params.g)

        att_t = _take(ctl.get("attitude", {}), {"k_theta1", "k_theta2", "theta_scale_rad", "diff_tau_s"}, "controller.attitude")
        d = AttitudeSettings()
        attitude = AttitudeSettings(
            float(att_t.get("k_theta1", d.k_theta1)),
            float(att_t.get("k_theta2", d.k_theta2)),
            float(att_t.get("theta_scale_rad", d.theta_scale)),
            float(att_t.get("diff_tau_s", d.diff_tau)),
        )

        f_t = _take(
            ctl.get("fsvc", {}),
            {"k_alpha1", "k_alpha2", "k_v", "gamma_alpha", "gamma_v", "diff_tau_s", "exact_tension"},
            "controller.fsvc",
        )
        gains = FsvcGains(
            **{k: float(f_t[k]) for k in ("k_alpha1", "k_alpha2", "k_v", "gamma_alpha", "gamma_v") if k in f_t}
        )
        fsvc = FsvcSettings(gains, attitude, float(f_t.get("diff_tau_s", 0.05)), bool(f_t.get("exact_tension", False)))

        p_t = _take(ctl.get("pid", {}), {"velocity_gains", "height_gains", "derivative_tau_s"}, "controller.pid")
        pid = PidSettings(
            _gain_triplet(p_t.get("velocity_gains", [7.0, 1.2, 5.0]), "controller.pid.velocity_gains"),
            _gain_triplet(p_t.get("height_gains", [3.0, 1.0, 2.0]), "controller.pid.height_gains"),
            float(p_t.get("derivative_tau_s", 0.05)),
            attitude,
        )

        r_t = _take(
            top.get("reference", {}),
            {"velocity_schedule", "height_schedule", "uav_height_m", "nominal_elevation_deg"},
            "reference",
        )
        if "uav_height_m" in r_t and "height_schedule" in r_t:
            raise ConfigError("give either uav_height_m or height_schedule, not both")
        velocity = _schedule(r_t["velocity_schedule"], "velocity_m_s", "reference.velocity_schedule") if r_t.get("velocity_schedule") else None
        if "height_schedule" in r_t:
            height = _schedule(r_t["height_schedule"], "height_m", "reference.height_schedule")
        else:
            height = Schedule(((0.0, float(r_t.get("uav_height_m", 5.0))),))

        return Scenario(
            name=str(top.get("name", Path(source).stem)),
            duration=float(top.get("duration_s", 60.0)),
            dt_physics=float(top.get("dt_physics_s", 1e-3)),
            dt_control=float(top.get("dt_control_s", 5e-3)),
            sea=sea,
            params=params,
            controller=str(ctl.get("type", "fsvc")),
            fsvc=fsvc,
            pid=pid,
            velocity=velocity,
            height=height,
            nominal_elevation=math.radians(float(r_t.get("nominal_elevation_deg", 45.0))),
            initial=str(top.get("initial", "water_velocity")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return scenario_from_dict(data, str(path))


def builtin_scenario(name: str) -> Scenario:
    """Load one of the packaged scenarios (``c1`` wave-free, ``c2`` following seas)."""
    ref = resources.files("uavbuoy.scenarios").joinpath(f"{name.lower()}.toml")
    if not ref.is_file():
        raise ConfigError(f"no built-in scenario named {name!r}")
    with resources.as_file(ref) as p:
        return load_scenario(p)
