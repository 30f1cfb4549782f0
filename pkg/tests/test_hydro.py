import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavbuoy.hydro import (
    BuoyGeometry,
    HydroCoefficients,
    draft,
    immersed_volume,
    rotation,
    skin_friction,
    wetted_area,
    world_frame_matrices,
)
from uavbuoy.params import Parameters

P = Parameters()
GEOM = BuoyGeometry.from_params(P)
COEF = HydroCoefficients.from_params(P)
V_B = 0.05


def test_derived_width_and_volume():
    assert P.width == pytest.approx(0.25, abs=1e-12)
    assert GEOM.volume == pytest.approx(V_B, abs=1e-12)
    assert P.m_b == pytest.approx(P.rho_w * GEOM.volume / 4, abs=1e-12)


def test_immersed_volume_limits():
    assert immersed_volume(GEOM, 1.0, 0.0) == 0.0
    assert immersed_volume(GEOM, -1.0, 0.0) == pytest.approx(V_B, abs=1e-15)
    assert immersed_volume(GEOM, 0.0625, 0.0) == pytest.approx(V_B / 4, abs=1e-15)


@given(st.floats(-1, 1), st.floats(0, 0.5), st.floats(-1, 1))
def test_immersed_volume_monotone_and_bounded(z, dz, zeta):
    hi = immersed_volume(GEOM, z, zeta)
    lo = immersed_volume(GEOM, z + dz, zeta)
    assert 0.0 <= lo <= hi + 1e-15 <= V_B + 1e-15


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_immersed_volume_continuous(z, zeta):
    h = 1e-9
    assert abs(immersed_volume(GEOM, z + h, zeta) - immersed_volume(GEOM, z, zeta)) <= GEOM.length * GEOM.width * h * 1.01


def test_static_float_is_quarter_draft():
    # bisection for rho_w V_im g = m_b g on a flat sea
    lo, hi = -1.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if P.rho_w * immersed_volume(GEOM, mid, 0.0) > P.m_b:
            lo = mid
        else:
            hi = mid
    assert immersed_volume(GEOM, lo, 0.0) / V_B == pytest.approx(0.25, abs=1e-9)
    assert draft(GEOM, lo, 0.0) == pytest.approx(P.h_b / 4, abs=1e-9)


def test_wetted_area():
    assert wetted_area(GEOM, 0.0) == 0.0
    assert wetted_area(GEOM, 0.25) == pytest.approx(0.8, abs=1e-15)
    assert wetted_area(GEOM, 0.0625) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(ValueError):
        wetted_area(GEOM, 0.3)
    with pytest.raises(ValueError):
        wetted_area(GEOM, -0.01)


def test_skin_friction():
    assert skin_friction(COEF, 0.2, 0.0, 0.0) == (0.0, 0.0)
    d1, _ = skin_friction(COEF, 0.2, 3.0, 0.0)
    assert d1 == pytest.approx(1.5, abs=1e-12)
    assert skin_friction(COEF, 0.2, -6.0, 0.0)[0] == pytest.approx(2 * d1)
    d1, d2 = skin_friction(COEF, 0.2, -1.0, -2.0)
    assert d1 >= 0 and d2 >= 0


def test_coefficients_must_be_non_negative():
    with pytest.raises(ValueError):
        HydroCoefficients(-1, 0, 0, 0, 0, 0, 1000)


def test_world_frame_at_zero_pitch():
    m, d = world_frame_matrices(COEF, GEOM, 0.0)
    np.testing.assert_array_equal(m, np.diag([13.125, 25.0]))
    np.testing.assert_array_equal(d, np.diag([0.0, 27.5]))


@given(st.floats(-1.5, 1.5), st.floats(0, 5), st.floats(0, 5))
def test_world_frame_is_a_similarity_transform(theta, ds1, ds2):
    m, d = world_frame_matrices(COEF, GEOM, theta, ds1, ds2)
    r = rotation(theta)
    m_body = np.diag([13.125, 25.0])
    d_body = np.diag([COEF.b11 + ds1, COEF.b33 + ds2])
    np.testing.assert_allclose(m, r @ m_body @ r.T, atol=1e-12)
    np.testing.assert_allclose(d, r @ d_body @ r.T, atol=1e-12)
    assert abs(m[0, 1] - m[1, 0]) < 1e-12
    assert np.linalg.det(m) == pytest.approx(13.125 * 25.0, rel=1e-12)
    assert np.all(np.linalg.eigvalsh(m) > 0)


def test_rotation_is_clockwise_positive():
    # a small positive pitch tips the body x axis downward in the world frame
    r = rotation(0.1)
    body_x_in_world = r @ np.array([1.0, 0.0])
    assert body_x_in_world[1] < 0
    np.testing.assert_allclose(r @ r.T, np.eye(2), atol=1e-15)


def test_world_frame_rejects_vertical_buoy():
    with pytest.raises(ValueError):
        world_frame_matrices(COEF, GEOM, math.pi / 2)
