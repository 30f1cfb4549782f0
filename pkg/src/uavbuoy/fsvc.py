"""Forward-surge velocity control (FSVC): polar-coordinate adaptive backstepping.

The outer loop regulates the buoy surge speed V through the radial thrust
u_T (which sets the cable tension) and the cable elevation angle alpha
through the tangential thrust u_alpha. Written in PID-like form, the
adaptive disturbance estimates are the integral states:

    delta_V_hat     = gamma_V * e_V^I
    delta_alpha_hat = gamma_alpha * k_alpha1 * e_alpha^I
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from uavbuoy.control import (
    AttitudeLoop,
    AttitudeSettings,
    CascadedFilter,
    ControlCommand,
    Differentiator,
    Measurement,
)
from uavbuoy.dynamics import Accelerations, EnvInputs, SystemState
from uavbuoy.errors import ReferenceInfeasibleError

COS_EPS = 1e-3


@dataclass(frozen=True)
class FsvcGains:
    k_alpha1: float = 1.0
    k_alpha2: float = 6.0
    k_v: float = 60.0
    gamma_alpha: float = 2.0
    gamma_v: float = 9.6

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"FSVC gain {name} must be positive, got {value}")

    @property
    def k_p_alpha(self) -> float:
        return 1.0 + self.k_alpha1 * self.k_alpha2

    @property
    def k_d_alpha(self) -> float:
        return self.k_alpha1 + self.k_alpha2

    @property
    def k_i_alpha(self) -> float:
        return self.gamma_alpha * self.k_alpha1

    @property
    def k_p_v(self) -> float:
        return self.k_v

    @property
    def k_i_v(self) -> float:
        return self.gamma_v

    def pid_alpha(self) -> tuple[float, float, float]:
        return self.k_p_alpha, self.k_i_alpha, self.k_d_alpha

    def pid_radial(self) -> tuple[float, float, float]:
        return self.k_p_v, self.k_i_v, 0.0


@dataclass
class FsvcState:
    e_v_int: float = 0.0
    e_alpha_int: float = 0.0
    last: tuple | None = None  # (u1, theta_raw, u_T, u_alpha) for controller hold
    held_samples: int = 0


@dataclass(frozen=True)
class References:
    v: float
    v_dot: float
    alpha: float
    alpha_dot: float
    alpha_ddot: float


def shape_velocity_reference(shaper: CascadedFilter, v_ref0: float) -> tuple[float, float]:
    """Read the smoothed reference and its derivative, then advance the shaper with ``v_ref0``."""
    out = shaper.value, shaper.derivative
    shaper.update(v_ref0)
    return out


def corrected_elevation_angle(z_ref: float, z_b: float, l: float) -> float:
    """Elevation angle that puts the UAV at height ``z_ref`` over the buoy."""
    ratio = (z_ref - z_b) / l
    if abs(ratio) > 1.0:
        raise ReferenceInfeasibleError(
            f"UAV height {z_ref:.3f} m unreachable from buoy height {z_b:.3f} m with a {l} m cable"
        )
    return math.asin(ratio)


def tension_estimate(state: SystemState, prev_acc: Accelerations, env: EnvInputs) -> float:
    """Cable tension from the buoy surge equation using last sample's accelerations, floored at 0."""
    ca = math.cos(state.alpha)
    if ca <= COS_EPS:
        raise ValueError("tension estimate needs cos(alpha) > eps")
    t = (env.m11 * prev_acc.x_b_ddot + env.m12 * prev_acc.z_b_ddot + env.d11 * env.v_rel + env.d12 * env.heave_rel) / ca
    return max(t, 0.0)


def fsvc_outer(
    state: SystemState,
    fstate: FsvcState,
    gains: FsvcGains,
    refs: References,
    tension: float,
    z_b_ddot: float,
    v_dot: float,
    params,
    dt: float,
) -> tuple[float, float, float, float, bool]:
    """One outer-loop evaluation.

    Returns ``(u1, theta_raw, u_T, u_alpha, saturated)`` and advances the
    integral states by ``dt``. ``theta_raw`` is the unsmoothed pitch command.
    """
    p = params
    alpha = state.alpha
    sa, ca = math.sin(alpha), math.cos(alpha)
    if ca <= COS_EPS:
        raise ValueError("FSVC outer loop needs cos(alpha) > eps")
    m_u, l, g = p.m_u, p.l, p.g

    e_v = state.V - refs.v
    e_a = alpha - refs.alpha
    e_a_dot = state.alpha_dot - refs.alpha_dot

    h_t = (l * state.alpha_dot**2 - z_b_ddot * sa - g * sa) / ca
    h_a = (v_dot * sa - z_b_ddot * ca - g * ca) / l
    u_t = tension + m_u * ca * (-h_t + refs.v_dot - gains.k_p_v * e_v - gains.k_i_v * fstate.e_v_int)
    u_a = m_u * l * (
        -h_a
        + refs.alpha_ddot
        - gains.k_p_alpha * e_a
        - gains.k_d_alpha * e_a_dot
        - gains.k_i_alpha * fstate.e_alpha_int
    )
    u1 = math.hypot(u_a, u_t)
    theta_raw = math.pi / 2 - alpha - math.atan2(u_a, u_t)
    saturated = u1 > p.u1_max
    if saturated:
        u1 = p.u1_max

    if not saturated:
        fstate.e_v_int += e_v * dt
    fstate.e_alpha_int += (e_a + e_a_dot / gains.k_alpha1) * dt
    return u1, theta_raw, u_t, u_a, saturated


@dataclass(frozen=True)
class FsvcSettings:
    gains: FsvcGains = field(default_factory=FsvcGains)
    attitude: AttitudeSettings = field(default_factory=AttitudeSettings)
    diff_tau: float = 0.05  # s, time constant of the alpha-reference differentiator
    exact_tension: bool = False  # oracle mode: solve T_hat = T at the sample instead of the delayed estimate


class FsvcController:
    name = "fsvc"

    def __init__(self, params, settings: FsvcSettings | None = None, dt: float = 0.005):
        self.params = params
        self.settings = settings or FsvcSettings()
        self.dt = dt
        self.state = FsvcState()
        self._shaper = CascadedFilter(params.tau_f, dt)
        self._alpha_diff = Differentiator(self.settings.diff_tau, dt)
        self.attitude = AttitudeLoop(self.settings.attitude, params.theta_um, params.j_u, dt)

    def reset(self, v_ref_initial: float = 0.0):
        self.state = FsvcState()
        self._shaper.reset(v_ref_initial)
        self._alpha_diff.reset(0.0, primed=False)
        self.attitude.reset()

    @property
    def delta_v_hat(self) -> float:
        return self.settings.gains.gamma_v * self.state.e_v_int

    @property
    def delta_alpha_hat(self) -> float:
        g = self.settings.gains
        return g.gamma_alpha * g.k_alpha1 * self.state.e_alpha_int

    def update(self, m: Measurement) -> ControlCommand:
        p = self.params
        st = m.state
        v_bar, v_bar_dot = shape_velocity_reference(self._shaper, m.v_ref0)
        alpha_bar = corrected_elevation_angle(m.z_ref, st.z_b, p.l)
        _, alpha_bar_dot, alpha_bar_ddot = self._alpha_diff.sample(alpha_bar)
        refs = References(v_bar, v_bar_dot, alpha_bar, alpha_bar_dot, alpha_bar_ddot)

        held = math.cos(st.alpha) <= COS_EPS
        if held:
            self.state.held_samples += 1
            u1, theta_raw, u_t, u_a = self.state.last or (p.m_u * p.g, 0.0, 0.0, 0.0)
            t_hat = float("nan")
            saturated = False
        else:
            t_hat = tension_estimate(st, m.prev_acc, m.env)
            acc = m.prev_acc
            snapshot = (self.state.e_v_int, self.state.e_alpha_int)
            u1, theta_raw, u_t, u_a, saturated = fsvc_outer(
                st, self.state, self.settings.gains, refs, t_hat, acc.z_b_ddot, acc.x_b_ddot, p, m.dt
            )
            if self.settings.exact_tension and m.tension_at is not None:
                u1, theta_raw, u_t, u_a, saturated, t_hat = self._solve_exact(m, refs, snapshot, t_hat)
            self.state.last = (u1, theta_raw, u_t, u_a)

        theta_c, u2 = self.attitude.update(theta_raw, st)
        return ControlCommand(u1, u2, u_t, u_a, theta_raw, theta_c, t_hat, v_bar, alpha_bar, held, saturated)

    def _solve_exact(self, m: Measurement, refs, snapshot, t_hat):
        """Fixed point T_hat = T(u1(T_hat)) by secant iteration on the scalar tension."""
        p = self.params
        acc = m.prev_acc

        def evaluate(t_guess):
            self.state.e_v_int, self.state.e_alpha_int = snapshot
            out = fsvc_outer(m.state, self.state, self.settings.gains, refs, t_guess, acc.z_b_ddot, acc.x_b_ddot, p, m.dt)
            return out, max(m.tension_at(out[0]), 0.0)

        x0 = t_hat
        out0, f0 = evaluate(x0)
        r0 = f0 - x0
        x1 = f0
        out1, f1 = evaluate(x1)
        r1 = f1 - x1
        for _ in range(50):
            if abs(r1) < 1e-10 or r1 == r0:
                break
            x0, r0, x1 = x1, r1, x1 - r1 * (x1 - x0) / (r1 - r0)
            x1 = max(x1, 0.0)
            out1, f1 = evaluate(x1)
            r1 = f1 - x1
        u1, theta_raw, u_t, u_a, saturated = out1
        return u1, theta_raw, u_t, u_a, saturated, x1
