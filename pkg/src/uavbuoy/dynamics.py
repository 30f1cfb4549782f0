"""Coupled taut-cable dynamics of the UAV-buoy system.

Generalised coordinates are the buoy position (x_b, z_b), the cable
elevation angle alpha and the UAV pitch theta_u. The cable is a rigid rod
of length l, so the UAV position is always derived:

    x_u = x_b + l cos(alpha),  z_u = z_b + l sin(alpha)

The surge/heave/elevation equations form a 3x3 linear system in the
accelerations, solved at every right-hand-side evaluation; the UAV pitch
obeys J_u theta_u'' = u2 on its own. Integration is classical fixed-step
RK4 with commands held over the step.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from uavbuoy.errors import ModelError, TensionUndefinedError
from uavbuoy.hydro import rotate_diagonal
from uavbuoy.waves import WaveField, surface_current

_COS_TOL = 1e-6


@dataclass
class SystemState:
    x_b: float = 0.0
    z_b: float = 0.0
    V: float = 0.0
    z_b_dot: float = 0.0
    alpha: float = math.pi / 4
    alpha_dot: float = 0.0
    theta_u: float = 0.0
    theta_u_dot: float = 0.0
    t: float = 0.0

    def vector(self) -> tuple:
        return (self.x_b, self.z_b, self.alpha, self.theta_u, self.V, self.z_b_dot, self.alpha_dot, self.theta_u_dot)

    @classmethod
    def from_vector(cls, y, t):
        x, z, a, th, v, zd, ad, thd = y
        return cls(x, z, v, zd, a, ad, th, thd, t)

    def uav_position(self, l: float) -> tuple[float, float]:
        return self.x_b + l * math.cos(self.alpha), self.z_b + l * math.sin(self.alpha)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RigidBodyParams:
    m_u: float
    j_u: float
    m_c: float
    l: float
    g: float

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def M_a(self) -> float:
        return self.m_u * self.l + self.m_c * self.l / 2.0

    @property
    def J_a(self) -> float:
        return self.m_u * self.l**2 + self.m_c * self.l**2 / 3.0

    @classmethod
    def from_params(cls, p):
        return cls(p.m_u, p.j_u, p.m_c, p.l, p.g)


@dataclass(frozen=True)
class Accelerations:
    x_b_ddot: float = 0.0
    z_b_ddot: float = 0.0
    alpha_ddot: float = 0.0
    theta_u_ddot: float = 0.0


@dataclass(frozen=True)
class EnvInputs:
    """Environment seen by the buoy at one instant."""

    theta_b: float
    v_rel: float  # V - U_cr - v_x^w
    heave_rel: float  # z_b_dot - v_z^w
    v_im: float  # m^3
    zeta: float
    u_cr: float
    vx: float
    vz: float
    d_s1: float
    d_s2: float
    m11: float
    m12: float
    m22: float
    d11: float
    d12: float
    d22: float


def solve3(a, b):
    """Solve the symmetric positive-definite 3x3 system ``a x = b``.

    Elimination without pivoting is stable for SPD matrices; a non-positive
    pivot means the matrix is not positive definite and is reported as a
    model failure.
    """
    (a00, a01, a02), (_, a11, a12), (_, _, a22) = a
    b0, b1, b2 = b
    if not a00 > 0.0:
        raise ModelError("generalised mass matrix is not positive definite")
    l10 = a01 / a00
    l20 = a02 / a00
    p11 = a11 - l10 * a01
    if not p11 > 1e-12 * a00:
        raise ModelError("generalised mass matrix is not positive definite")
    p12 = a12 - l10 * a02
    l21 = p12 / p11
    p22 = a22 - l20 * a02 - l21 * p12
    if not p22 > 1e-12 * a00:
        raise ModelError("generalised mass matrix is not positive definite")
    c1 = b1 - l10 * b0
    c2 = b2 - l20 * b0 - l21 * c1
    x2 = c2 / p22
    x1 = (c1 - p12 * x2) / p11
    x0 = (b0 - a01 * x1 - a02 * x2) / a00
    return x0, x1, x2


class CoupledModel:
    """Equations of motion for one parameter set and sea state."""

    def __init__(self, params, field: WaveField):
        self.params = params
        self.field = field
        p = params
        self.M_a = p.M_a
        self.J_a = p.J_a
        self.u_cr = surface_current(field)
        self._m_ext = p.m_u + p.m_c
        self._m_tot = p.m_b + p.m_u + p.m_c
        self._m1 = p.m_b + p.a11
        self._m3 = p.m_b + p.a33
        self._half_h = 0.5 * p.h_b
        self._plan_area = p.l_b * p.width
        self._wet_per_draft = 4.0 * p.l_b
        self._half_rho = 0.5 * p.rho_w

    def environment(self, x_b, z_b, V, z_b_dot, t) -> EnvInputs:
        p = self.params
        zeta, vx, vz, slope = self.field.sample(x_b, min(z_b, 0.0), t)
        depth = min(max(zeta - (z_b - self._half_h), 0.0), p.h_b)
        v_rel = V - self.u_cr - vx
        heave_rel = z_b_dot - vz
        area = self._wet_per_draft * depth
        d_s1 = p.c_s1 * area * self._half_rho * abs(v_rel)
        d_s2 = p.c_s2 * area * self._half_rho * abs(heave_rel)
        theta_b = math.atan(slope)
        m11, m12, _, m22 = rotate_diagonal(self._m1, self._m3, theta_b)
        d11, d12, _, d22 = rotate_diagonal(p.b11 + d_s1, p.b33 + d_s2, theta_b)
        return EnvInputs(
            theta_b, v_rel, heave_rel, depth * self._plan_area, zeta, self.u_cr, vx, vz, d_s1, d_s2,
            m11, m12, m22, d11, d12, d22,
        )

    def environment_for(self, state: SystemState) -> EnvInputs:
        return self.environment(state.x_b, state.z_b, state.V, state.z_b_dot, state.t)

    def system(self, alpha, alpha_dot, theta_u, u1, env: EnvInputs):
        """Generalised mass matrix and right-hand side of the surge/heave/elevation equations."""
        p = self.params
        sa, ca = math.sin(alpha), math.cos(alpha)
        ma = self.M_a
        ad2 = alpha_dot * alpha_dot
        a = (
            (env.m11 + self._m_ext, env.m12, -ma * sa),
            (env.m12, env.m22 + self._m_ext, ma * ca),
            (-ma * sa, ma * ca, self.J_a),
        )
        b = (
            u1 * math.sin(theta_u) + ma * ca * ad2 - env.d11 * env.v_rel - env.d12 * env.heave_rel + p.buoy_force_bias,
            u1 * math.cos(theta_u)
            + p.rho_w * env.v_im * p.g
            - self._m_tot * p.g
            + ma * sa * ad2
            - env.d22 * env.heave_rel
            - env.d12 * env.v_rel,
            u1 * p.l * math.cos(alpha + theta_u) - ma * p.g * ca,
        )
        return a, b

    def accelerations(self, state: SystemState, u1, u2, env: EnvInputs | None = None) -> Accelerations:
        if env is None:
            env = self.environment_for(state)
        a, b = self.system(state.alpha, state.alpha_dot, state.theta_u, u1, env)
        try:
            xdd, zdd, add = solve3(a, b)
        except ModelError as exc:
            raise ModelError(str(exc), state.as_dict()) from None
        return Accelerations(xdd, zdd, add, u2 / self.params.j_u)

    def rhs(self, t, y, u1, u2):
        # inlined environment() + system() + solve3(); keep in sync with those
        p = self.params
        x, z, alpha, theta, v, zd, ad, thd = y
        zeta, vx, vz, slope = self.field.sample(x, z if z < 0.0 else 0.0, t)
        depth = zeta - (z - self._half_h)
        if depth < 0.0:
            depth = 0.0
        elif depth > p.h_b:
            depth = p.h_b
        v_rel = v - self.u_cr - vx
        heave_rel = zd - vz
        fric = self._wet_per_draft * depth * self._half_rho
        e1 = p.b11 + p.c_s1 * fric * abs(v_rel)
        e3 = p.b33 + p.c_s2 * fric * abs(heave_rel)
        # rotation by theta_b = atan(slope)
        cb2 = 1.0 / (1.0 + slope * slope)
        sb2 = slope * slope * cb2
        scb = slope * cb2
        m1, m3 = self._m1, self._m3
        m11 = cb2 * m1 + sb2 * m3
        m12 = scb * (m3 - m1)
        m22 = sb2 * m1 + cb2 * m3
        d11 = cb2 * e1 + sb2 * e3
        d12 = scb * (e3 - e1)
        d22 = sb2 * e1 + cb2 * e3
        sa, ca = math.sin(alpha), math.cos(alpha)
        ma = self.M_a
        ad2 = ad * ad
        b0 = u1 * math.sin(theta) + ma * ca * ad2 - d11 * v_rel - d12 * heave_rel + p.buoy_force_bias
        b1 = (
            u1 * math.cos(theta)
            + p.rho_w * depth * self._plan_area * p.g
            - self._m_tot * p.g
            + ma * sa * ad2
            - d22 * heave_rel
            - d12 * v_rel
        )
        b2 = u1 * p.l * math.cos(alpha + theta) - ma * p.g * ca
        xdd, zdd, add = solve3(
            ((m11 + self._m_ext, m12, -ma * sa), (m12, m22 + self._m_ext, ma * ca), (-ma * sa, ma * ca, self.J_a)),
            (b0, b1, b2),
        )
        return (v, zd, ad, thd, xdd, zdd, add, u2 / p.j_u)

    def rk4(self, t, y, u1, u2, dt):
        f = self.rhs
        h2 = 0.5 * dt
        k1 = f(t, y, u1, u2)
        k2 = f(t + h2, [yi + h2 * ki for yi, ki in zip(y, k1)], u1, u2)
        k3 = f(t + h2, [yi + h2 * ki for yi, ki in zip(y, k2)], u1, u2)
        k4 = f(t + dt, [yi + dt * ki for yi, ki in zip(y, k3)], u1, u2)
        h6 = dt / 6.0
        return tuple(yi + h6 * (a + 2.0 * (b + c) + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4))

    def step(self, state: SystemState, u1, u2, dt) -> SystemState:
        if not dt > 0:
            raise ValueError("dt must be positive")
        try:
            y = self.rk4(state.t, state.vector(), u1, u2, dt)
        except ModelError as exc:
            raise ModelError(str(exc), state.as_dict()) from None
        if not all(math.isfinite(v) for v in y):
            raise ModelError(f"non-finite state after step at t={state.t:.6f}", state.as_dict())
        return SystemState.from_vector(y, state.t + dt)

    def tension(self, state: SystemState, acc: Accelerations, env: EnvInputs) -> float:
        """Cable tension from the buoy surge equation, including any applied bias force."""
        ca = math.cos(state.alpha)
        if abs(ca) < _COS_TOL:
            raise TensionUndefinedError("cable tension undefined for a vertical cable", state.as_dict())
        return (
            env.m11 * acc.x_b_ddot
            + env.m12 * acc.z_b_ddot
            + env.d11 * env.v_rel
            + env.d12 * env.heave_rel
            - self.params.buoy_force_bias
        ) / ca

    def tension_polar(self, state: SystemState, acc: Accelerations, u1: float) -> float:
        """Tension from the UAV's radial equation of motion in the polar frame."""
        p = self.params
        sa, ca = math.sin(state.alpha), math.cos(state.alpha)
        return (
            p.m_u * (-acc.x_b_ddot * ca - acc.z_b_ddot * sa)
            - p.m_u * p.g * sa
            + u1 * math.sin(state.alpha + state.theta_u)
            + p.m_u * p.l * state.alpha_dot**2
        )

    def free_buoy_rhs(self, t, y):
        """Buoy alone (no cable load): surge/heave accelerations from hydrostatics and damping."""
        p = self.params
        x, z, v, zd = y
        env = self.environment(x, z, v, zd, t)
        f1 = -env.d11 * env.v_rel - env.d12 * env.heave_rel + p.buoy_force_bias
        f2 = -env.d12 * env.v_rel - env.d22 * env.heave_rel + p.rho_w * env.v_im * p.g - p.m_b * p.g
        det = env.m11 * env.m22 - env.m12 * env.m12
        xdd = (env.m22 * f1 - env.m12 * f2) / det
        zdd = (env.m11 * f2 - env.m12 * f1) / det
        return (v, zd, xdd, zdd)


def assemble(state: SystemState, u1, env: EnvInputs, params, field: WaveField | None = None):
    """Return (A, b) as numpy arrays for inspection and testing."""
    model = CoupledModel(params, field or WaveField.calm(g=params.g))
    a, b = model.system(state.alpha, state.alpha_dot, state.theta_u, u1, env)
    return np.array(a), np.array(b)


def assemble_and_solve(state: SystemState, u1, u2, env: EnvInputs, params, field: WaveField | None = None) -> Accelerations:
    if u1 < 0:
        raise ValueError("total thrust must be non-negative")
    model = CoupledModel(params, field or WaveField.calm(g=params.g))
    return model.accelerations(state, u1, u2, env)


def cable_tension_true(state: SystemState, acc: Accelerations, env: EnvInputs, params) -> float:
    return CoupledModel(params, WaveField.calm(g=params.g)).tension(state, acc, env)


def cable_tension_polar(state: SystemState, acc: Accelerations, u1: float, params) -> float:
    return CoupledModel(params, WaveField.calm(g=params.g)).tension_polar(state, acc, u1)


def step(state: SystemState, commands, field: WaveField, params, dt: float) -> SystemState:
    """Advance one RK4 step holding ``commands = (u1, u2)`` constant."""
    u1, u2 = commands
    return CoupledModel(params, field).step(state, u1, u2, dt)
