"""Hydrostatics and hydrodynamics of a box-shaped buoy.

Only the surge/heave block is modelled; the buoy pitch follows the wave
slope kinematically, so its inertia and damping never enter the equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BuoyGeometry:
    length: float  # m
    height: float  # m
    width: float  # m
    mass: float  # kg

    @property
    def volume(self) -> float:
        return self.length * self.width * self.height

    @classmethod
    def from_params(cls, p):
        return cls(p.l_b, p.h_b, p.width, p.m_b)


@dataclass(frozen=True)
class HydroCoefficients:
    a11: float  # kg
    a33: float  # kg
    b11: float  # N s/m
    b33: float  # N s/m
    c_s1: float
    c_s2: float
    rho_w: float  # kg/m^3

    def __post_init__(self):
        for name, value in vars(self).items():
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")

    @classmethod
    def from_params(cls, p):
        return cls(p.a11, p.a33, p.b11, p.b33, p.c_s1, p.c_s2, p.rho_w)


def draft(geom: BuoyGeometry, z_b: float, zeta: float) -> float:
    """Immersed depth measured vertically at the buoy centre, clamped to [0, h_b]."""
    d = zeta - (z_b - 0.5 * geom.height)
    return min(max(d, 0.0), geom.height)


def immersed_volume(geom: BuoyGeometry, z_b: float, zeta: float) -> float:
    return draft(geom, z_b, zeta) * geom.length * geom.width


def wetted_area(geom: BuoyGeometry, depth: float) -> float:
    """Wetted area, linear in draft and equal to 4 l_b h_b when fully submerged."""
    if not 0.0 <= depth <= geom.height:
        raise ValueError(f"draft {depth} outside [0, {geom.height}]")
    return 4.0 * geom.length * depth


def skin_friction(coeffs: HydroCoefficients, area: float, v_rel: float, heave_rel: float) -> tuple[float, float]:
    """Linearised skin-friction coefficients (D_S1, D_S2) in N s/m."""
    if area < 0:
        raise ValueError("wetted area must be non-negative")
    half_rho_a = 0.5 * coeffs.rho_w * area
    return coeffs.c_s1 * half_rho_a * abs(v_rel), coeffs.c_s2 * half_rho_a * abs(heave_rel)


def rotate_diagonal(d1: float, d2: float, theta: float) -> tuple[float, float, float, float]:
    """Elements (11, 12, 21, 22) of R diag(d1, d2) R^-1 for a clockwise angle theta."""
    c = math.cos(theta)
    s = math.sin(theta)
    off = s * c * (d2 - d1)
    return c * c * d1 + s * s * d2, off, off, s * s * d1 + c * c * d2


def rotation(theta: float) -> np.ndarray:
    """Body-to-world rotation in the x-z plane, clockwise-positive angle."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def world_frame_matrices(
    coeffs: HydroCoefficients, geom: BuoyGeometry, theta_b: float, d_s1: float = 0.0, d_s2: float = 0.0
) -> tuple[np.ndarray, np.ndarray]:
    """Surge/heave inertia and damping matrices of the buoy expressed in the world frame."""
    if not abs(theta_b) < math.pi / 2:
        raise ValueError("buoy pitch must satisfy |theta_b| < pi/2")
    m = rotate_diagonal(geom.mass + coeffs.a11, geom.mass + coeffs.a33, theta_b)
    d = rotate_diagonal(coeffs.b11 + d_s1, coeffs.b33 + d_s2, theta_b)
    return np.array(m).reshape(2, 2), np.array(d).reshape(2, 2)
