"""Closed-form solutions of the profile flow, used as oracles.

Round cylinder: F(z,t) = sqrt(-2t), shrinking with F_t = -1/sqrt(-2t).
Round sphere of radius a(t) = sqrt(-4t): in the equator gauge (origin at the
equator) F(z,t) = a cos(z/a).  Direct substitution shows this satisfies

    F_t = F_zz - F^{-1}(1 - F_z^2) - 2 F_z int_0^z (F_zz/F) dz'

exactly: the nonlocal integral is -z/a^2 and both sides equal
-(2/a) cos(z/a) - (2z/a^2) sin(z/a).

Both are provided as window states (Dirichlet ends, no tips) for convergence
studies, and the sphere also as a full dome with tips to exercise the
tip-chart machinery.  For the rescaled difference diagnostics, the
beta-shifted cylinder gives closed-form frames: G = 0 for the exact cylinder
and G = sqrt(2(1 + beta e^tau)) - sqrt(2) for its time translate, spatially
constant.
"""

from __future__ import annotations

import math

import numpy as np

from .profile_pde import ProfileState, validate_state

__all__ = [
    "cylinder_radius",
    "cylinder_profile",
    "cylinder_boundary",
    "sphere_radius",
    "sphere_profile",
    "sphere_boundary",
    "sphere_dome",
    "cylinder_beta_g",
]


def cylinder_radius(t: float) -> float:
    """Radius sqrt(-2t) of the exact shrinking cylinder."""
    return math.sqrt(-2.0 * t)


def cylinder_profile(t: float, z_half: float, dz: float) -> ProfileState:
    """Cylinder window state on [-z_half, z_half] (no tips)."""
    n = int(round(z_half / dz))
    z = dz * np.arange(-n, n + 1)
    f = np.full_like(z, cylinder_radius(t))
    state = ProfileState(
        t=t, z_grid=z, f=f, tip_left=math.nan, tip_right=math.nan, gauge_origin_index=n
    )
    validate_state(state)
    return state


def cylinder_boundary(t: float) -> tuple[float, float]:
    """Dirichlet end values for the cylinder window."""
    r = cylinder_radius(t)
    return r, r


def sphere_radius(t: float) -> float:
    """Radius a(t) = sqrt(-4t) of the exact shrinking round sphere."""
    return math.sqrt(-4.0 * t)


def _sphere_f(z: np.ndarray | float, t: float) -> np.ndarray | float:
    a = sphere_radius(t)
    return a * np.cos(np.asarray(z) / a)


def sphere_profile(t: float, z_half: float, dz: float) -> ProfileState:
    """Sphere window state (equator gauge) on [-z_half, z_half], no tips."""
    a = sphere_radius(t)
    if z_half >= 0.5 * math.pi * a:
        raise ValueError("window reaches the poles; shrink z_half")
    n = int(round(z_half / dz))
    z = dz * np.arange(-n, n + 1)
    state = ProfileState(
        t=t,
        z_grid=z,
        f=np.asarray(_sphere_f(z, t)),
        tip_left=math.nan,
        tip_right=math.nan,
        gauge_origin_index=n,
    )
    validate_state(state)
    return state


def sphere_boundary(z_half: float):
    """Dirichlet boundary callable t -> (F(-z_half,t), F(z_half,t))."""

    def bc(t: float) -> tuple[float, float]:
        v = float(_sphere_f(z_half, t))
        return v, v

    return bc


def sphere_dome(t: float, dz: float, buffer: float = 0.45) -> ProfileState:
    """Full sphere with tips at +- (pi/2) a, equator gauge."""
    a = sphere_radius(t)
    tip = 0.5 * math.pi * a
    n = int(math.floor((tip - buffer * dz) / dz))
    z = dz * np.arange(-n, n + 1)
    state = ProfileState(
        t=t,
        z_grid=z,
        f=np.asarray(_sphere_f(z, t)),
        tip_left=-tip,
        tip_right=tip,
        gauge_origin_index=n,
    )
    validate_state(state)
    return state


def cylinder_beta_g(tau: float, beta: float) -> float:
    """Rescaled offset G of the beta time-translated cylinder.

    F(z, t - beta) = sqrt(-2(t - beta)) gives, at rescaled time
    tau = -log(-t),  G = e^{tau/2} F - sqrt(2) = sqrt(2(1 + beta e^tau)) - sqrt(2),
    constant in xi.
    """
    val = 2.0 * (1.0 + beta * math.exp(tau))
    if val <= 0.0:
        raise ValueError("beta shift exceeds the cylinder lifetime at this tau")
    return math.sqrt(val) - math.sqrt(2.0)
