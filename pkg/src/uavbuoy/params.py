"""Physical parameters of the UAV-cable-buoy system.

Defaults reproduce the published parameter table. The buoy width is not
listed there; it follows from quarter immersion at rest
(``m_b = rho_w * V_b / 4``) together with ``l_b`` and ``h_b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from uavbuoy.errors import ConfigError


@dataclass(frozen=True)
class Parameters:
    # buoy
    l_b: float = 0.8  # m
    h_b: float = 0.25  # m
    m_b: float = 12.5  # kg
    w_b: float | None = None  # m, derived from quarter immersion when None
    a11: float = 0.625  # kg
    a33: float = 12.5  # kg
    b11: float = 0.0  # N s/m
    b33: float = 27.5  # N s/m
    c_s1: float = 5e-3
    c_s2: float = 9e-3
    # UAV and cable
    m_u: float = 1.8  # kg
    j_u: float = 0.03  # kg m^2
    theta_um: float = math.pi / 4  # rad
    l: float = 7.0  # m
    m_c: float = 0.5  # kg
    tau_f: float = 2.0  # s
    # environment
    g: float = 9.81  # m/s^2
    rho_w: float = 1000.0  # kg/m^3
    rho_air: float = 1.225  # kg/m^3
    # energy surrogate and actuator limit
    disk_area: float = 0.3  # m^2
    thrust_to_weight: float = 4.0
    # constant horizontal force on the buoy, unknown to the controllers
    buoy_force_bias: float = 0.0  # N
    width: float = field(init=False, repr=False)

    def __post_init__(self):
        for f in fields(self):
            if f.name in ("w_b", "width", "buoy_force_bias", "b11", "b33", "a11", "a33", "c_s1", "c_s2", "m_c"):
                continue
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"parameter {f.name} must be a positive finite number, got {value!r}")
        for name in ("a11", "a33", "b11", "b33", "c_s1", "c_s2", "m_c"):
            if getattr(self, name) < 0:
                raise ConfigError(f"parameter {name} must be non-negative")
        if not 0 < self.theta_um < math.pi / 2:
            raise ConfigError("theta_um must lie in (0, pi/2)")
        width = self.w_b
        if width is None:
            width = 4.0 * self.m_b / (self.rho_w * self.l_b * self.h_b)
        if width <= 0:
            raise ConfigError("buoy width must be positive")
        object.__setattr__(self, "width", float(width))
        if not self.m_b < self.rho_w * self.volume:
            raise ConfigError("buoy mass must be below rho_w * V_b or it sinks")

    @property
    def volume(self) -> float:
        return self.l_b * self.width * self.h_b

    @property
    def M_a(self) -> float:
        return self.m_u * self.l + self.m_c * self.l / 2.0

    @property
    def J_a(self) -> float:
        return self.m_u * self.l**2 + self.m_c * self.l**2 / 3.0

    @property
    def u1_max(self) -> float:
        return self.thrust_to_weight * self.m_u * self.g

    def replace(self, **changes) -> "Parameters":
        values = {f.name: getattr(self, f.name) for f in fields(self) if f.init}
        unknown = set(changes) - set(values)
        if unknown:
            raise ConfigError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        values.update(changes)
        return Parameters(**values)
