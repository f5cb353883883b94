"""Closed-form shrinking-cylinder and round-sphere states.

Oracles: the cylinder radius sqrt(-2t) and sphere profile sqrt(-4t) cos(z /
sqrt(-4t)) are exact solutions of the profile equation, so every numeric
check below is against a hand-evaluated closed form.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from ovalflow import exact
from ovalflow.profile_pde import scalar_curvature, tip_scalar_curvature, validate_state

# --- cylinder ---------------------------------------------------------------


def test_cylinder_radius_closed_form():
    assert exact.cylinder_radius(-1.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert exact.cylinder_radius(-8.0) == pytest.approx(4.0, rel=1e-15)


def test_cylinder_profile_is_flat_window():
    st = exact.cylinder_profile(-2.0, z_half=5.0, dz=0.1)
    assert not st.has_tips
    assert np.all(st.f == st.f[0])
    assert st.f[0] == pytest.approx(2.0, rel=1e-15)
    assert st.z_grid[st.gauge_origin_index] == 0.0
    validate_state(st)


def test_cylinder_boundary_matches_radius():
    left, right = exact.cylinder_boundary(-3.0)
    assert left == right == exact.cylinder_radius(-3.0)


def test_cylinder_scalar_curvature_is_one():
    # R = 2/F^2 = 1 for the t = -1 cylinder; only rounding noise survives.
    st = exact.cylinder_profile(-1.0, z_half=6.0, dz=0.05)
    r = scalar_curvature(st)
    assert np.max(np.abs(r - 1.0)) <= 1e-12


# --- sphere ------------------------------------------------------------------


def test_sphere_radius_closed_form():
    assert exact.sphere_radius(-0.25) == pytest.approx(1.0, rel=1e-15)
    assert exact.sphere_radius(-25.0) == pytest.approx(10.0, rel=1e-15)


def test_sphere_profile_values():
    st = exact.sphere_profile(-25.0, z_half=8.0, dz=0.05)
    a = 10.0
    assert np.max(np.abs(st.f - a * np.cos(st.z_grid / a))) <= 1e-14
    assert not st.has_tips


def test_sphere_profile_rejects_window_reaching_poles():
    # t = -0.25 gives radius 1, poles at +-pi/2 ~ 1.5708.
    with pytest.raises(ValueError, match="window reaches the poles"):
        exact.sphere_profile(-0.25, z_half=1.6, dz=0.01)


def test_sphere_boundary_callable():
    bc = exact.sphere_boundary(2.5)
    left, right = bc(-25.0)
    expect = 10.0 * math.cos(0.25)
    assert left == pytest.approx(expect, rel=1e-15)
    assert right == pytest.approx(expect, rel=1e-15)


def test_sphere_dome_has_tips_at_poles():
    dome = exact.sphere_dome(-0.25, dz=0.002)
    assert dome.has_tips
    assert dome.tip_left == pytest.approx(-math.pi / 2.0, rel=1e-12)
    assert dome.tip_right == pytest.approx(math.pi / 2.0, rel=1e-12)
    assert np.min(dome.f) > 0.0
    validate_state(dome)


def test_unit_sphere_tip_curvature_is_six():
    # R = 6 on the unit sphere (t = -1/4).  Fitted tip curvature must agree
    # to 1e-6 at both refinement levels.
    for dz, frozen in ((0.002, 5.999999999991812), (0.001, 6.0000000000456595)):
        dome = exact.sphere_dome(-0.25, dz=dz)
        r_left, r_right = tip_scalar_curvature(dome)
        assert abs(r_left - 6.0) <= 1e-6
        assert abs(r_right - 6.0) <= 1e-6
        assert r_left == pytest.approx(frozen, abs=1e-8)
        assert r_right == pytest.approx(r_left, rel=1e-12)


def test_sphere_family_is_gamma_invariant():
    # F(z, t) = sqrt(-4t) cos(z / sqrt(-4t)) satisfies
    # exp(gamma/2) F(exp(-gamma/2) z, exp(-gamma) t) = F(z, t) identically.
    z = np.linspace(-1.0, 1.0, 41)
    t = -2.0
    base = math.sqrt(-4.0 * t) * np.cos(z / math.sqrt(-4.0 * t))
    for gamma in (0.3, -0.7, 2.0):
        ts = math.exp(-gamma) * t
        a = math.sqrt(-4.0 * ts)
        mapped = math.exp(gamma / 2.0) * a * np.cos(math.exp(-gamma / 2.0) * z / a)
        assert np.max(np.abs(mapped - base)) <= 1e-14


# --- cylinder beta shift ------------------------------------------------------


def test_cylinder_beta_g_closed_form():
    for tau, beta in ((-20.0, 1.0e6), (-5.0, 3.0), (-5.0, -100.0), (0.0, 0.5)):
        expect = math.sqrt(2.0 * (1.0 + beta * math.exp(tau))) - math.sqrt(2.0)
        assert exact.cylinder_beta_g(tau, beta) == pytest.approx(expect, rel=1e-15)
    assert exact.cylinder_beta_g(-10.0, 0.0) == 0.0


def test_cylinder_beta_g_rejects_past_extinction():
    with pytest.raises(ValueError, match="beta shift exceeds the cylinder lifetime"):
        exact.cylinder_beta_g(0.0, -2.0)
