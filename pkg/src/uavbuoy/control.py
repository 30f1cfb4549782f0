"""Pieces shared by both outer-loop controllers: filters, pitch smoothing, attitude loop."""

from __future__ import annotations

import math
from dataclasses import dataclass

from uavbuoy.dynamics import Accelerations, EnvInputs, SystemState


@dataclass(frozen=True)
class Measurement:
    """Everything a controller sees at one control sample (full state feedback)."""

    t: float
    state: SystemState
    env: EnvInputs
    prev_acc: Accelerations  # accelerations under the previously held command
    v_ref0: float  # raw velocity setpoint, m/s
    z_ref: float  # UAV height setpoint, m
    dt: float
    # true cable tension as a function of thrust at this instant; only used by oracle tests
    tension_at: object = None


@dataclass(frozen=True)
class ControlCommand:
    u1: float  # N
    u2: float  # N m
    u_T: float  # radial thrust, N
    u_alpha: float  # tangential thrust, N
    theta_c_raw: float  # pitch command before smoothing, rad
    theta_c: float  # smoothed pitch command, rad
    tension_estimate: float = float("nan")
    v_ref: float = float("nan")
    alpha_ref: float = float("nan")
    held: bool = False
    saturated: bool = False


class CascadedFilter:
    """Two cascaded first-order lags, 1/(tau s + 1)^2, discretised exactly for a held input.

    Besides the filtered value it exposes the analytic first and second
    derivatives of the filter output, which makes it usable both as a
    reference shaper and as a smooth differentiator.
    """

    def __init__(self, tau: float, dt: float, initial: float = 0.0):
        if not tau > 0:
            raise ValueError("filter time constant must be positive")
        if not dt > 0:
            raise ValueError("filter sample time must be positive")
        self.tau = tau
        self.dt = dt
        a = math.exp(-dt / tau)
        self._a = a
        self._b = (dt / tau) * a
        self.primed = False
        self.reset(initial)

    def reset(self, value: float = 0.0, primed: bool = False):
        self.x1 = value
        self.x2 = value
        self.primed = primed

    @property
    def value(self) -> float:
        return self.x2

    @property
    def derivative(self) -> float:
        return (self.x1 - self.x2) / self.tau

    def update(self, u: float):
        """Advance one sample with input ``u`` held over the interval."""
        a, b = self._a, self._b
        x1, x2 = self.x1, self.x2
        self.x2 = a * x2 + b * x1 + (1.0 - a - b) * u
        self.x1 = a * x1 + (1.0 - a) * u
        self.primed = True


class Differentiator(CascadedFilter):
    """Filtered numerical differentiation of a sampled signal.

    ``sample(u)`` returns (filtered value, first derivative, second derivative)
    and advances the filter. The second derivative is the mean over the coming
    hold interval, i.e. the change of the exact first derivative across it.
    Reading it instead from the current sample and the lagging states would
    bias it by about slope * dt / (2 tau^2) on a ramp.

    The first sample initialises the filter at rest on the input, so a
    constant signal has zero derivatives from the start.
    """

    def sample(self, u: float) -> tuple[float, float, float]:
        if not self.primed:
            self.reset(u, primed=True)
        value, rate = self.value, self.derivative
        self.update(u)
        return value, rate, (self.derivative - rate) / self.dt


def smooth_pitch_command(theta_raw: float, theta_max: float, theta_scale: float) -> float:
    """Bounded pitch command theta_max * tanh(theta_raw / theta_scale)."""
    if not 0 < theta_max < math.pi / 2:
        raise ValueError("theta_max must lie in (0, pi/2)")
    if not theta_scale > 0:
        raise ValueError("theta_scale must be positive")
    return theta_max * math.tanh(theta_raw / theta_scale)


def inner_attitude(
    theta_u: float,
    theta_u_dot: float,
    theta_c: float,
    theta_c_dot: float,
    theta_c_ddot: float,
    k_theta1: float,
    k_theta2: float,
    j_u: float,
) -> float:
    """Pitch torque J_u (-k_P e - k_D e' + theta_c'') with k_P = 1 + k1 k2, k_D = k1 + k2."""
    if not (k_theta1 > 0 and k_theta2 > 0):
        raise ValueError("attitude gains must be positive")
    k_p = 1.0 + k_theta1 * k_theta2
    k_d = k_theta1 + k_theta2
    err = theta_u - theta_c
    err_dot = theta_u_dot - theta_c_dot
    return j_u * (-k_p * err - k_d * err_dot + theta_c_ddot)


def attitude_gains_from_pd(k_p: float, k_d: float) -> tuple[float, float]:
    """Invert k_P = 1 + k1 k2, k_D = k1 + k2; returns (smaller root, larger root)."""
    disc = k_d**2 - 4.0 * (k_p - 1.0)
    if disc < 0 or k_p <= 1.0:
        raise ValueError(f"no positive backstepping gains reproduce k_P={k_p}, k_D={k_d}")
    r = math.sqrt(disc)
    return (k_d - r) / 2.0, (k_d + r) / 2.0


@dataclass(frozen=True)
class AttitudeSettings:
    k_theta1: float = 2.0
    k_theta2: float = 3.4
    # tanh scale, rad; None means equal to the pitch limit. Scales near the limit
    # (0.79 rad) let the pitch loop pump the buoy heave mode; 1.0 keeps it damped.
    theta_scale: float | None = 1.0
    diff_tau: float = 0.05  # s, command differentiator time constant

    def __post_init__(self):
        if not (self.k_theta1 > 0 and self.k_theta2 > 0 and self.diff_tau > 0):
            raise ValueError("attitude settings must be positive")
        if self.theta_scale is not None and not self.theta_scale > 0:
            raise ValueError("theta_scale must be positive")

    @property
    def k_p(self) -> float:
        return 1.0 + self.k_theta1 * self.k_theta2

    @property
    def k_d(self) -> float:
        return self.k_theta1 + self.k_theta2


class AttitudeLoop:
    """Pitch smoothing plus the inner PD-like attitude law."""

    def __init__(self, settings: AttitudeSettings, theta_max: float, j_u: float, dt: float):
        self.settings = settings
        self.theta_max = theta_max
        self.theta_scale = settings.theta_scale if settings.theta_scale is not None else theta_max
        self.j_u = j_u
        self._diff = Differentiator(settings.diff_tau, dt)

    def reset(self):
        self._diff.reset(0.0, primed=False)

    def update(self, theta_raw: float, state: SystemState) -> tuple[float, float]:
        """Return (smoothed pitch command, pitch torque u2)."""
        theta_c = smooth_pitch_command(theta_raw, self.theta_max, self.theta_scale)
        _, theta_c_dot, theta_c_ddot = self._diff.sample(theta_c)
        s = self.settings
        u2 = inner_attitude(
            state.theta_u, state.theta_u_dot, theta_c, theta_c_dot, theta_c_ddot, s.k_theta1, s.k_theta2, self.j_u
        )
        return theta_c, u2
