"""Cartesian PID benchmark: buoy surge-velocity and UAV-height channels.

Each channel outputs a desired UAV acceleration; the pair is mapped to a
total thrust and pitch with the usual small-vehicle relation

    u1 = m_u sqrt(a_x^2 + (g + a_z)^2),   theta = atan2(a_x, g + a_z)

and the pitch goes through the same smoothing and attitude loop as FSVC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from uavbuoy.control import AttitudeLoop, AttitudeSettings, CascadedFilter, ControlCommand, Measurement
from uavbuoy.fsvc import shape_velocity_reference


class PidChannel:
    """Parallel-form PID with a first-order filtered derivative on the error."""

    def __init__(self, k_p: float, k_i: float, k_d: float, tau_d: float = 0.05):
        if min(k_p, k_i, k_d) < 0:
            raise ValueError("PID gains must be non-negative")
        if not tau_d > 0:
            raise ValueError("derivative filter time constant must be positive")
        self.k_p, self.k_i, self.k_d = k_p, k_i, k_d
        self.tau_d = tau_d
        self.reset()

    def reset(self):
        self.integral = 0.0
        self.derivative = 0.0
        self.prev_error = None
        self._last_increment = 0.0

    def unwind(self):
        """Undo the most recent integral increment (used when the output saturates)."""
        self.integral -= self._last_increment
        self._last_increment = 0.0


def pid_step(channel: PidChannel, error: float, dt: float) -> float:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if channel.prev_error is not None:
        raw = (error - channel.prev_error) / dt
        channel.derivative += dt / (channel.tau_d + dt) * (raw - channel.derivative)
    channel.prev_error = error
    channel._last_increment = error * dt
    channel.integral += channel._last_increment
    return channel.k_p * error + channel.k_i * channel.integral + channel.k_d * channel.derivative


@dataclass(frozen=True)
class PidSettings:
    velocity_gains: tuple = (7.0, 1.2, 5.0)
    height_gains: tuple = (3.0, 1.0, 2.0)
    derivative_tau: float = 0.05
    attitude: AttitudeSettings = field(default_factory=AttitudeSettings)


def pid_outer(a_x: float, a_z: float, params) -> tuple[float, float, bool]:
    """Map desired accelerations to (u1, unsmoothed pitch, saturated)."""
    vertical = params.g + a_z
    u1 = params.m_u * math.hypot(a_x, vertical)
    saturated = u1 > params.u1_max
    if saturated:
        u1 = params.u1_max
    return u1, math.atan2(a_x, vertical), saturated


class PidController:
    name = "pid"

    def __init__(self, params, settings: PidSettings | None = None, dt: float = 0.005):
        self.params = params
        self.settings = settings or PidSettings()
        self.dt = dt
        s = self.settings
        self.velocity = PidChannel(*s.velocity_gains, tau_d=s.derivative_tau)
        self.height = PidChannel(*s.height_gains, tau_d=s.derivative_tau)
        self._shaper = CascadedFilter(params.tau_f, dt)
        self.attitude = AttitudeLoop(s.attitude, params.theta_um, params.j_u, dt)

    def reset(self, v_ref_initial: float = 0.0):
        self.velocity.reset()
        self.height.reset()
        self._shaper.reset(v_ref_initial)
        self.attitude.reset()

    def update(self, m: Measurement) -> ControlCommand:
        p = self.params
        st = m.state
        v_bar, _ = shape_velocity_reference(self._shaper, m.v_ref0)
        _, z_u = st.uav_position(p.l)
        a_x = pid_step(self.velocity, v_bar - st.V, m.dt)
        a_z = pid_step(self.height, m.z_ref - z_u, m.dt)
        u1, theta_raw, saturated = pid_outer(a_x, a_z, p)
        if saturated:
            self.velocity.unwind()
            self.height.unwind()
        theta_c, u2 = self.attitude.update(theta_raw, st)
        u_t = u1 * math.sin(st.alpha + theta_c)
        u_a = u1 * math.cos(st.alpha + theta_c)
        return ControlCommand(u1, u2, u_t, u_a, theta_raw, theta_c, float("nan"), v_bar, float("nan"), False, saturated)
