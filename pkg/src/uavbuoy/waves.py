"""Linear deep-water waves and surface current in the vertical plane.

The sea surface is a finite sum of regular components

    zeta(x, t) = sum A_n sin(d_n w_n t - k_n x + s_n),   k_n = w_n^2 / g

with particle velocities decaying as exp(k_n z) below the mean level.
Everything here is a pure function of an immutable field description.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class WaveComponent:
    amplitude: float  # m
    omega: float  # rad/s
    direction: int = 1  # +1 travels towards +x
    phase: float = 0.0  # rad
    g: float = 9.81
    k: float = field(init=False)  # 1/m, deep-water dispersion

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ValueError(f"wave amplitude must be >= 0, got {self.amplitude}")
        if not self.omega > 0:
            raise ValueError(f"wave frequency must be > 0, got {self.omega}")
        if self.direction not in (-1, 1):
            raise ValueError(f"wave direction must be -1 or +1, got {self.direction}")
        if not -math.pi < self.phase <= math.pi:
            raise ValueError(f"wave phase must lie in (-pi, pi], got {self.phase}")
        object.__setattr__(self, "k", self.omega**2 / self.g)

    @classmethod
    def from_period(cls, amplitude, period, direction=1, phase=0.0, g=9.81):
        return cls(amplitude, 2.0 * math.pi / period, direction, phase, g)

    def argument(self, x, t):
        return self.direction * self.omega * t - self.k * x + self.phase


@dataclass(frozen=True)
class WaveField:
    components: tuple = ()
    lumped_current: float = 0.0  # m/s
    g: float = 9.81

    def __post_init__(self):
        comps = tuple(self.components)
        for c in comps:
            if c.g != self.g:
                raise ValueError("wave components must share the field's gravity")
        object.__setattr__(self, "components", comps)
        # flat tuples for the hot loop
        active = [c for c in comps if c.amplitude > 0.0]
        object.__setattr__(
            self,
            "_terms",
            tuple((c.amplitude, c.direction * c.omega, c.k, c.phase, c.direction * c.omega * c.amplitude) for c in active),
        )

    @classmethod
    def calm(cls, lumped_current=0.0, g=9.81):
        return cls((), lumped_current, g)

    def sample(self, x, z, t):
        """Return ``(elevation, vx, vz, slope)`` at one point in a single pass.

        ``slope`` is sum A_n k_n cos(.), the tangent of the buoy pitch.
        """
        if z > 0.0:
            raise ValueError(f"wave velocities are undefined above mean sea level (z={z})")
        elev = vx = vz = slope = 0.0
        for amp, dw, k, phase, dwa in self._terms:
            arg = dw * t - k * x + phase
            s = math.sin(arg)
            c = math.cos(arg)
            decay = math.exp(k * z)
            elev += amp * s
            vx += dwa * decay * s
            vz += dwa * decay * c
            slope += amp * k * c
        return elev, vx, vz, slope


def surface_elevation(field: WaveField, x: float, t: float) -> float:
    return sum(c.amplitude * math.sin(c.argument(x, t)) for c in field.components)


def wave_particle_velocity(field: WaveField, x: float, z: float, t: float) -> tuple[float, float]:
    """Horizontal and vertical wave-induced particle velocity at depth ``z <= 0``."""
    if z > 0.0:
        raise ValueError(f"wave velocities are undefined above mean sea level (z={z})")
    vx = vz = 0.0
    for c in field.components:
        arg = c.argument(x, t)
        gain = c.direction * c.omega * c.amplitude * math.exp(c.k * z)
        vx += gain * math.sin(arg)
        vz += gain * math.cos(arg)
    return vx, vz


def stokes_drift(field: WaveField) -> float:
    """Deep-water surface Stokes drift, sum d_n w_n k_n A_n^2."""
    return sum(c.direction * c.omega * c.k * c.amplitude**2 for c in field.components)


def surface_current(field: WaveField) -> float:
    return field.lumped_current + stokes_drift(field)


def wave_slope_pitch(field: WaveField, x_b: float, t: float) -> float:
    """Buoy pitch (clockwise positive) prescribed by the local wave slope."""
    return math.atan(sum(c.amplitude * c.k * math.cos(c.argument(x_b, t)) for c in field.components))
