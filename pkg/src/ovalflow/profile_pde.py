"""Nonlocal profile flow for the sphere-radius function F(z, t).

A rotationally symmetric metric dz^2 + F(z,t)^2 g_{S^2} flowing by Ricci flow
in arc-length gauge obeys

    F_t = F_zz - F^{-1} (1 - F_z^2) - 2 F_z * int_0^z (F_zz / F) dz',

where z is signed arc-length from the gauge origin and the nonlocal term is
the gauge correction that keeps z arc-length.  This module builds oval-like
initial data (a parabolic cylindrical body glued C^1 into scaled steady-
soliton caps), advances the flow with an explicit two-chart scheme, and
evaluates the asymptotic estimates the construction is supposed to satisfy as
normalized residuals.

Stepping is dual-chart.  The F-equation degenerates at tips (F -> 0 with
|F_z| -> 1), so near each tip the flow is advanced for U(r, t) := F_z^2 at
radius r = F, which satisfies the local, tip-regular equation

    U_t = U U_rr - (1/2) U_r^2 + r^{-2} (1 - U) (r U_r + 2 U),   U(0) = 1.

(The nonlocal term of the F-equation cancels identically in the U variables;
the steady profile U = Phi(r/c) is a fixed point for every cap scale c.)
After each Euler step of the F-chart, the U-charts advance with sub-cycled
steps, the tip positions are recovered from z_tip = z_anchor + int_0^{r_a}
dr / sqrt(U), and F is rebuilt near the tips by inverting z(r).

Scale glossary for an oval at time t:  L = log(-t), cap width
c = sqrt((-t)/L), body F^2 = -2t - (z^2 + 2t)/(2L), tips near
+- sqrt((-t)(4L + 2)), tip scalar curvature ~ 1/c^2 = L/(-t).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .bryant import BryantCurve

__all__ = [
    "ProfileState",
    "EvolveConfig",
    "StepFailure",
    "validate_state",
    "build_initial_profile",
    "rhs",
    "nonlocal_integral",
    "step",
    "evolve",
    "scalar_curvature",
    "tip_scalar_curvature",
    "concavity_monitor",
    "asymptotics_report",
    "save_snapshot",
    "load_snapshot",
]

CONCAVITY_TOL = 1e-6  # discrete F_zz <= CONCAVITY_TOL * max F
SLOPE_TOL = 1e-6  # |F_z| <= 1 + SLOPE_TOL
TIP_SLOPE_BAND = 0.05  # one-sided slope into the tip within this of -/+1
_TIP_BUFFER = 0.45  # drop grid nodes closer than this many dz to a tip
_CHART_CFL = 0.15  # sub-step size for the U-chart, in units of dr^2
_MAX_HALVINGS = 8


@dataclass(eq=False)
class _TipChart:
    """Radial chart U(r) = F_z^2 at radius r near one tip."""

    side: int  # +1 right tip, -1 left tip
    r: np.ndarray  # uniform grid [0, r_out]
    u: np.ndarray  # U values; u[0] = 1 exactly


@dataclass(eq=False)
class ProfileState:
    """One time slice of the flow: F sampled on a uniform z grid.

    tip_left / tip_right are the interpolated zeros of F just outside the
    grid; they are NaN for window states (exact-solution segments evolved
    with Dirichlet ends instead of free tips).
    """

    t: float
    z_grid: np.ndarray
    f: np.ndarray
    tip_left: float
    tip_right: float
    gauge_origin_index: int
    _charts: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def dz(self) -> float:
        return float(self.z_grid[1] - self.z_grid[0])

    @property
    def has_tips(self) -> bool:
        return math.isfinite(self.tip_left) and math.isfinite(self.tip_right)


@dataclass
class EvolveConfig:
    """Run parameters for build_initial_profile / step / evolve.

    boundary_values supplies exact Dirichlet end values t -> (F_left,
    F_right) for window states; snapshot cadence is either uniform in t
    (snapshot_dt) or an explicit list of times (snapshot_times), hit exactly
    by shortening steps.
    """

    t0: float
    dz: float
    dt_safety: float = 0.2
    theta_match: float = 0.05
    remesh_every: int = 500
    boundary_values: Callable[[float], tuple[float, float]] | None = None
    snapshot_dt: float | None = None
    snapshot_times: np.ndarray | None = None

    def __post_init__(self):
        if not (0.0 < self.dt_safety <= 0.5):
            raise ValueError(f"dt_safety must be in (0, 0.5], got {self.dt_safety}")
        if not (0.0 < self.theta_match <= 0.1):
            raise ValueError(f"theta_match must be in (0, 0.1], got {self.theta_match}")
        if self.dz <= 0.0:
            raise ValueError("dz must be positive")
        if self.t0 >= 0.0:
            raise ValueError("t0 must be negative")


class StepFailure(RuntimeError):
    """A step kept violating state invariants after repeated dt halving.

    Carries the last attempted state for post-mortem inspection.
    """

    def __init__(self, message: str, state: ProfileState | None = None):
        super().__init__(message)
        self.diagnostic_state = state


# ---------------------------------------------------------------------------
# discrete derivatives


def _first_derivative(f: np.ndarray, dz: float) -> np.ndarray:
    return np.gradient(f, dz, edge_order=2)


def _second_derivative(f: np.ndarray, dz: float) -> np.ndarray:
    d2 = np.empty_like(f)
    d2[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dz**2
    # second-order one-sided stencils at the ends
    d2[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dz**2
    d2[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / dz**2
    return d2


def _smoothstep(u: np.ndarray | float) -> np.ndarray | float:
    """Quintic smoothstep: C^2 ramp from 0 at u<=0 to 1 at u>=1."""
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


# ---------------------------------------------------------------------------
# state validation


def validate_state(state: ProfileState) -> None:
    """Raise ValueError if any ProfileState invariant fails."""
    z, f = state.z_grid, state.f
    if len(z) < 8:
        raise ValueError("grid too short")
    dzs = np.diff(z)
    if not np.allclose(dzs, dzs[0], rtol=1e-9) or dzs[0] <= 0:
        raise ValueError("z grid must be uniform and increasing")
    if state.t >= 0.0:
        raise ValueError("state time must be negative")
    goi = state.gauge_origin_index
    if not (0 <= goi < len(z)) or abs(z[goi]) > 1e-9 * dzs[0]:
        raise ValueError("gauge origin index must point at z = 0")
    if np.any(f <= 0.0):
        j = int(np.argmin(f))
        raise ValueError(f"F <= 0 at interior node z = {z[j]:.6g}")
    dz = float(dzs[0])
    # Discrete Lipschitz form of |F_z| <= 1: every node-to-node rise is at
    # most dz.  (Centered differences are means of these secants, so they
    # inherit the bound; one-sided second-order estimates at the ends do
    # not, overshooting by O(dz^2 F_zzz), and are deliberately not used.)
    secants = np.abs(np.diff(f)) / dz
    if np.max(secants) > 1.0 + SLOPE_TOL:
        j = int(np.argmax(secants))
        raise ValueError(
            f"|F_z| = {secants[j]:.8f} > 1 + {SLOPE_TOL} between z = {z[j]:.6g} and z = {z[j + 1]:.6g}"
        )
    fzz_int = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dz**2
    tol = CONCAVITY_TOL * float(np.max(f))
    if np.max(fzz_int) > tol:
        j = int(np.argmax(fzz_int)) + 1
        raise ValueError(
            f"concavity violated: discrete F_zz = {fzz_int[j - 1]:.3e} > {tol:.3e} at z = {z[j]:.6g}"
        )
    if state.has_tips:
        if not (state.tip_left < z[0] and state.tip_right > z[-1]):
            raise ValueError("tips must lie strictly outside the grid")
        s_right = f[-1] / (state.tip_right - z[-1])
        s_left = f[0] / (z[0] - state.tip_left)
        if not (1.0 - TIP_SLOPE_BAND <= s_right <= 1.0 + TIP_SLOPE_BAND):
            raise ValueError(f"right tip slope {s_right:.4f} outside 1 +- {TIP_SLOPE_BAND}")
        if not (1.0 - TIP_SLOPE_BAND <= s_left <= 1.0 + TIP_SLOPE_BAND):
            raise ValueError(f"left tip slope {s_left:.4f} outside 1 +- {TIP_SLOPE_BAND}")


# ---------------------------------------------------------------------------
# initial data


def build_initial_profile(cfg: EvolveConfig, curve: BryantCurve) -> ProfileState:
    """Oval-like initial data: parabolic body glued C^1 into steady caps.

    Body: F^2 = -2t - (z^2 + 2t)/(2L) with L = log(-t0); caps: F = c B(zbar),
    zbar = (z_tip -+ z)/c, c = sqrt((-t0)/L).  The matching point is where the
    two slope fields agree; across a band of half-width 5*theta_match*c the
    slope (not the value) is blended with a quintic smoothstep and integrated,
    which keeps F_z continuous and preserves discrete concavity (a direct
    value blend of two C^1-touching curves can bulge convex).  The tip
    position is the free parameter, fixed by requiring the integrated band to
    land exactly on the body value at its left edge.
    """
    t0 = cfg.t0
    ell = math.log(-t0)
    if ell < 8.0:
        raise ValueError(f"rejected configuration: log(-t0) = {ell:.3f} < 8")
    c = math.sqrt(-t0 / ell)
    w = 5.0 * cfg.theta_match * c
    z_body_root = math.sqrt((-t0) * (4.0 * ell + 2.0))

    zbar_max = float(curve.z_grid[-1])
    if zbar_max * c < z_body_root * 0.25:
        raise ValueError("arc-length curve too short for this t0; extend z_max")

    b_interp = PchipInterpolator(curve.z_grid, curve.b, extrapolate=False)
    bp_interp = PchipInterpolator(curve.z_grid, curve.b_prime, extrapolate=False)

    def body(z):
        return np.sqrt(-2.0 * t0 - (np.square(z) + 2.0 * t0) / (2.0 * ell))

    def body_slope(z):
        return -z / (2.0 * ell * body(z))

    def cap_val(z, zp):
        return c * b_interp((zp - z) / c)

    def cap_slope(z, zp):
        return -bp_interp((zp - z) / c)

    def match_z(zp):
        h = lambda z: body_slope(z) - cap_slope(z, zp)
        return brentq(h, 0.2 * z_body_root, z_body_root * (1.0 - 1e-10), xtol=1e-12 * c)

    def closure(zp):
        zm = match_z(zp)
        zs = np.linspace(zm - w, zm + w, 801)
        s = _smoothstep((zs - (zm - w)) / (2.0 * w))
        slope = (1.0 - s) * body_slope(zs) + s * cap_slope(zs, zp)
        band = float(np.trapezoid(slope, zs))
        left_val = cap_val(zm + w, zp) - band
        return left_val - body(zm - w)

    # scan for a sign change of the closure defect, then refine
    zps = z_body_root + c * np.linspace(0.05, 2.0, 40)
    vals = np.array([closure(zp) for zp in zps])
    sign_flip = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if len(sign_flip) == 0:
        raise ValueError("cap placement failed: no closure root; check theta_match")
    k = sign_flip[0]
    z_tip = brentq(closure, zps[k], zps[k + 1], xtol=1e-12 * c)
    z_m = match_z(z_tip)
    if not (w < z_m and z_m + w < z_body_root):
        raise ValueError("matching band leaves the body domain; reduce theta_match")

    # assemble the right half on nodes m*dz, then mirror
    dz = cfg.dz
    n_half = int(math.floor((z_tip - _TIP_BUFFER * dz) / dz))
    z_half = dz * np.arange(n_half + 1)
    f_half = np.empty_like(z_half)
    in_body = z_half <= z_m - w
    in_cap = z_half >= z_m + w
    in_band = ~(in_body | in_cap)
    f_half[in_body] = body(z_half[in_body])
    f_half[in_cap] = cap_val(z_half[in_cap], z_tip)
    if np.any(in_band):
        # integrate the blended slope leftward from the cap edge
        zs = np.linspace(z_m - w, z_m + w, 1601)
        s = _smoothstep((zs - (z_m - w)) / (2.0 * w))
        slope = (1.0 - s) * body_slope(zs) + s * cap_slope(zs, z_tip)
        vals = cap_val(z_m + w, z_tip) - (
            cumulative_trapezoid(slope[::-1], dx=zs[1] - zs[0], initial=0.0)[::-1]
        )
        f_half[in_band] = PchipInterpolator(zs, vals)(z_half[in_band])

    z = np.concatenate([-z_half[:0:-1], z_half])
    f = np.concatenate([f_half[:0:-1], f_half])
    state = ProfileState(
        t=t0,
        z_grid=z,
        f=f,
        tip_left=-z_tip,
        tip_right=z_tip,
        gauge_origin_index=n_half,
    )
    validate_state(state)
    return state


# ---------------------------------------------------------------------------
# right-hand side and curvature


def nonlocal_integral(state: ProfileState) -> np.ndarray:
    """int_0^z (F_zz / F) dz' by cumulative trapezoid anchored at the origin."""
    dz = state.dz
    fzz = _second_derivative(state.f, dz)
    cum = cumulative_trapezoid(fzz / state.f, dx=dz, initial=0.0)
    return cum - cum[state.gauge_origin_index]


def rhs(state: ProfileState) -> np.ndarray:
    """Time derivative field F_zz - F^{-1}(1 - F_z^2) - 2 F_z int_0^z F_zz/F."""
    f = state.f
    if np.any(f <= 0.0):
        raise ValueError("degenerate state: F <= 0 at an interior node")
    dz = state.dz
    fz = _first_derivative(f, dz)
    fzz = _second_derivative(f, dz)
    integral = nonlocal_integral(state)
    return fzz - (1.0 - fz * fz) / f - 2.0 * fz * integral


def scalar_curvature(state: ProfileState) -> np.ndarray:
    """R = 2 F^{-2} (1 - F_z^2) - 4 F_zz / F at the grid nodes."""
    f = state.f
    if np.any(f <= 0.0):
        raise ValueError("degenerate state: F <= 0 at an interior node")
    dz = state.dz
    fz = _first_derivative(f, dz)
    fzz = _second_derivative(f, dz)
    return 2.0 * (1.0 - fz * fz) / (f * f) - 4.0 * fzz / f


def tip_scalar_curvature(state: ProfileState) -> tuple[float, float]:
    """(R at left tip, R at right tip) read off the radial chart at each tip.

    Near a tip the slope field U(r) = F_z^2 is smooth and even in r with
    U(0) = 1, and R = 2 r^{-2}(1 - U) - 2 U'(r)/r tends to -3 U''(0) at the
    tip.  Evaluating R on grid nodes and extrapolating instead loses to
    cancellation: both 2 F^{-2}(1 - F_z^2) and 4 F_zz/F carry O(1) relative
    truncation error at the nodes nearest a tip.  So the tip value comes
    from a least-squares fit U = 1 + b r^2 + q r^4 over the inner half of
    the tip chart, giving R = -6 b.
    """
    if not state.has_tips:
        raise ValueError("state has no tips")

    def fit(side: int) -> float:
        r_out = _chart_radius(state)
        zs, fs = _monotone_tail(
            state, side, min(3.0 * r_out, 0.8 * float(np.max(state.f)))
        )
        h = float(zs[1] - zs[0])
        # fourth-order interior slopes; the two one-sided nodes at each end
        # carry O(h^2) bias that the small-r^2 division would amplify
        fz = (fs[:-4] - 8.0 * fs[1:-3] + 8.0 * fs[3:-1] - fs[4:]) / (12.0 * h)
        rr = fs[2:-2]
        du = fz * fz - 1.0
        sel = rr <= 0.5 * r_out
        if int(np.sum(sel)) < 7:
            sel = np.zeros_like(sel)
            sel[-7:] = True
        rr, du = rr[sel], du[sel]
        design = np.stack([np.ones_like(rr), rr**2, rr**4], axis=1)
        coef, *_ = np.linalg.lstsq(design, du, rcond=None)
        return -6.0 * float(coef[1])

    return fit(-1), fit(+1)


# ---------------------------------------------------------------------------
# tip charts


def tip_slope_chart(state: ProfileState, side: int) -> tuple[np.ndarray, np.ndarray]:
    """Radial slope-field samples near one tip: (r, U) with U(r) = F_z^2 at
    radius r on a uniform r-grid from 0 to the chart radius.  This is the
    same chart the stepper uses; it extends profile queries below the last
    grid node, where the arc-length parametrization degenerates."""
    chart = _build_chart(state, side)
    return chart.r.copy(), chart.u.copy()


def _monotone_tail(state: ProfileState, side: int, f_ceiling: float):
    """Grid slice approaching one tip where F is strictly monotone and below
    f_ceiling; returns (z_slice, f_slice) ordered from the body toward the tip."""
    z, f = state.z_grid, state.f
    j_max = int(np.argmax(f))
    if side > 0:
        zs, fs = z[j_max:], f[j_max:]
    else:
        zs, fs = -z[: j_max + 1][::-1], f[: j_max + 1][::-1]
    keep = fs < f_ceiling
    k0 = int(np.argmax(keep))
    if not keep[k0]:
        raise ValueError("no nodes below the chart ceiling on this side")
    zs, fs = zs[k0:], fs[k0:]
    if len(fs) < 4 or np.any(np.diff(fs) >= 0.0):
        raise ValueError("near-tip profile is not monotone; cannot build chart")
    return zs, fs


def _chart_radius(state: ProfileState) -> float:
    return float(min(40.0 * state.dz, 0.25 * np.max(state.f)))


def _build_chart(state: ProfileState, side: int) -> _TipChart:
    """Initialize U(r) = F_z^2 by sampling the discrete profile."""
    r_out = _chart_radius(state)
    dr = 0.5 * state.dz
    n = int(math.ceil(r_out / dr))
    r = dr * np.arange(n + 1)
    zs, fs = _monotone_tail(state, side, min(3.0 * r_out, 0.8 * float(np.max(state.f))))
    fz = np.gradient(fs, zs[1] - zs[0], edge_order=2)
    # U is even in r with U(0) = 1; interpolate evenly-mirrored samples so
    # the interpolant carries U'(0) = 0 instead of a spurious one-sided slope.
    u_vals = (fz * fz)[::-1]
    u_of_r = PchipInterpolator(
        np.concatenate([-fs, [0.0], fs[::-1]]),  # fs decreases, so -fs increases
        np.concatenate([u_vals[::-1], [1.0], u_vals]),
    )
    u = u_of_r(r)
    u[0] = 1.0
    return _TipChart(side=side, r=r, u=np.clip(u, 1e-12, 1.0))


def _sample_u_at(state: ProfileState, side: int, radius: float) -> float:
    """F_z^2 on the stepped profile at the given radius (chart boundary data)."""
    zs, fs = _monotone_tail(state, side, min(4.0 * radius, 0.8 * float(np.max(state.f))))
    fz = np.gradient(fs, zs[1] - zs[0], edge_order=2)
    val = PchipInterpolator(fs[::-1], (fz * fz)[::-1])(radius)
    return float(np.clip(val, 1e-12, 1.0))


def _step_chart(chart: _TipChart, dt: float, u_out: float) -> _TipChart:
    """Advance the U-equation by dt with sub-cycled explicit steps."""
    r, u = chart.r, chart.u.copy()
    dr = float(r[1] - r[0])
    m = max(1, int(math.ceil(dt / (_CHART_CFL * dr * dr))))
    dts = dt / m
    r_int = r[1:-1]
    for _ in range(m):
        ur = np.gradient(u, dr, edge_order=2)
        urr = np.empty_like(u)
        urr[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dr**2
        rate = (
            u[1:-1] * urr[1:-1]
            - 0.5 * ur[1:-1] ** 2
            + (1.0 - u[1:-1]) * (r_int * ur[1:-1] + 2.0 * u[1:-1]) / r_int**2
        )
        u[1:-1] += dts * rate
        u[0] = 1.0
        u[-1] = u_out
        if np.any(u <= 0.0) or np.any(u > 1.0 + 1e-9):
            raise ValueError("U left (0, 1] during chart step")
    return _TipChart(side=chart.side, r=r, u=u)


def _rebuild_tip(
    z: np.ndarray, f: np.ndarray, chart: _TipChart
) -> tuple[np.ndarray, np.ndarray, float]:
    """Rewrite F near one tip from the chart and return (z, f, tip position).

    The arc-length map z(r) = z_anchor + int_r^{r_a} dr~ / sqrt(U) is anchored
    where the stepped F-chart passes through r_a = 0.8 r_out, integrated down
    to r = 0 for the tip, and inverted for the node values.  Stepped and
    rebuilt values are blended over F in [0.5 r_out, r_a] so neither chart's
    noise is injected abruptly into the other.
    """
    side = chart.side
    if side < 0:
        z_m, f_m, tip = _rebuild_tip(-z[::-1], f[::-1], replace(chart, side=+1))
        return -z_m[::-1], f_m[::-1], -tip

    r, u = chart.r, chart.u
    r_out = float(r[-1])
    f_cut = 0.5 * r_out
    k_a = int(round(0.8 * (len(r) - 1)))
    r_a = float(r[k_a])

    j_max = int(np.argmax(f))
    zs, fs = z[j_max:], f[j_max:]
    if np.any(np.diff(fs) >= 0.0):
        keep = fs < 0.8 * float(np.max(f))
        k0 = int(np.argmax(keep))
        zs, fs = zs[k0:], fs[k0:]
        if np.any(np.diff(fs) >= 0.0):
            raise ValueError("near-tip profile is not monotone; cannot anchor rebuild")
    z_a = float(PchipInterpolator(fs[::-1], zs[::-1])(r_a))

    big_j = cumulative_trapezoid(1.0 / np.sqrt(u), dx=float(r[1] - r[0]), initial=0.0)
    tip = z_a + float(big_j[k_a])
    z_of_r = z_a + big_j[k_a] - big_j  # decreasing in r
    r_of_z = PchipInterpolator(z_of_r[::-1], r[::-1])

    # keep nodes safely inside the new tip, rebuild where the map covers
    dz = z[1] - z[0]
    keep_mask = z < tip - _TIP_BUFFER * dz
    z_new = z[keep_mask]
    f_new = f[keep_mask].copy()
    zone = z_new > z_a
    if np.any(zone):
        rebuilt = r_of_z(z_new[zone])
        s = _smoothstep((f_new[zone] - f_cut) / (r_a - f_cut))
        f_new[zone] = s * f_new[zone] + (1.0 - s) * rebuilt
        # Interpolating the chart between its nodes can overshoot slope 1
        # by O(dr^2) where the true slope approaches 1, so cap node-to-node
        # drops at dz; this raises a stray node by at most that same error.
        i0 = max(int(np.argmax(zone)) - 1, 0)
        idx = np.arange(len(f_new) - i0)
        lifted = f_new[i0:] + idx * dz
        f_new[i0:] = np.maximum.accumulate(lifted) - idx * dz
    return z_new, f_new, tip


# ---------------------------------------------------------------------------
# stepping


def _attempt_step(state: ProfileState, cfg: EvolveConfig, dt: float) -> ProfileState:
    t_new = state.t + dt
    f_new = state.f + dt * rhs(state)

    if not state.has_tips:
        if cfg.boundary_values is None:
            raise ValueError("window state (no tips) requires cfg.boundary_values")
        left, right = cfg.boundary_values(t_new)
        f_new[0] = left
        f_new[-1] = right
        return ProfileState(
            t=t_new,
            z_grid=state.z_grid,
            f=f_new,
            tip_left=math.nan,
            tip_right=math.nan,
            gauge_origin_index=state.gauge_origin_index,
        )

    charts = state._charts
    if charts is None:
        charts = (_build_chart(state, -1), _build_chart(state, +1))

    interim = replace(state, t=t_new, f=f_new)
    z, f = state.z_grid, f_new
    new_charts = []
    tips = {}
    for chart in charts:
        u_out = _sample_u_at(interim, chart.side, float(chart.r[-1]))
        stepped = _step_chart(chart, dt, u_out)
        z, f, tip = _rebuild_tip(z, f, stepped)
        new_charts.append(stepped)
        tips[chart.side] = tip

    # trimming only removes end nodes, so z = 0 is still on the grid
    goi = int(np.argmin(np.abs(z)))
    out = ProfileState(
        t=t_new,
        z_grid=z,
        f=f,
        tip_left=tips[-1],
        tip_right=tips[+1],
        gauge_origin_index=goi,
        _charts=tuple(new_charts),
    )
    validate_state(out)
    return out


def step(state: ProfileState, cfg: EvolveConfig, dt: float | None = None) -> ProfileState:
    """One explicit step; on invariant violation the step retries with dt/2."""
    if dt is None:
        dt = cfg.dt_safety * cfg.dz**2
    last_err: Exception | None = None
    for _ in range(_MAX_HALVINGS + 1):
        try:
            return _attempt_step(state, cfg, dt)
        except ValueError as err:
            last_err = err
            dt *= 0.5
    raise StepFailure(f"step failed after {_MAX_HALVINGS} dt halvings: {last_err}", state=state)


def _remesh(state: ProfileState, dz: float) -> ProfileState:
    """Fresh uniform grid between the tips, monotone cubic resample of F."""
    if not state.has_tips:
        return state
    interp = PchipInterpolator(state.z_grid, state.f)
    n_right = int(math.floor((state.tip_right - _TIP_BUFFER * dz) / dz))
    n_left = int(math.floor((-state.tip_left - _TIP_BUFFER * dz) / dz))
    z = dz * np.arange(-n_left, n_right + 1)
    lo, hi = state.z_grid[0], state.z_grid[-1]
    f = interp(np.clip(z, lo, hi))
    out = ProfileState(
        t=state.t,
        z_grid=z,
        f=f,
        tip_left=state.tip_left,
        tip_right=state.tip_right,
        gauge_origin_index=n_left,
    )
    validate_state(out)
    return out


def evolve(state: ProfileState, cfg: EvolveConfig, t_end: float) -> list[ProfileState]:
    """Step from state.t to t_end, landing exactly on each snapshot time.

    Returns the snapshot list (always including the initial and final
    states).  Every snapshot passes validate_state.
    """
    if not (state.t < t_end < 0.0):
        raise ValueError(f"t_end must lie in ({state.t}, 0), got {t_end}")
    targets = [t_end]
    if cfg.snapshot_times is not None:
        targets += [float(s) for s in cfg.snapshot_times if state.t < s < t_end]
    elif cfg.snapshot_dt:
        k, s = 1, state.t + cfg.snapshot_dt
        while s < t_end - 1e-12 * abs(t_end):
            targets.append(s)
            k += 1
            s = state.t + k * cfg.snapshot_dt
    targets = sorted(set(targets))

    dt_nom = cfg.dt_safety * cfg.dz**2
    snaps = [state]
    validate_state(state)
    steps_since_remesh = 0
    for target in targets:
        while state.t < target - 1e-12 * abs(target):
            n = max(1, int(math.ceil((target - state.t) / dt_nom)))
            dt = (target - state.t) / n
            state = step(state, cfg, dt)
            steps_since_remesh += 1
            if cfg.remesh_every and steps_since_remesh >= cfg.remesh_every:
                state = _remesh(state, cfg.dz)
                steps_since_remesh = 0
        snaps.append(state)
    return snaps


# ---------------------------------------------------------------------------
# monitors


def concavity_monitor(state: ProfileState, L0: float) -> dict:
    """Concavity of H = F^2/2 + t over the region F^2 >= L0^2 (-t)/log(-t).

    PASS means the max of discrete H_zz over the region is at most
    1e-6 * (-t)^{-1} * max F^2.  An empty region (possible at moderate -t,
    where even the equator sits below the threshold) passes vacuously and is
    flagged as such.
    """
    z, f, t = state.z_grid, state.f, state.t
    dz = state.dz
    h = 0.5 * f * f + t
    h_zz = (h[2:] - 2.0 * h[1:-1] + h[:-2]) / dz**2
    threshold = L0**2 * (-t) / math.log(-t)
    mask = (f[1:-1] ** 2) >= threshold
    tol = 1e-6 * float(np.max(f) ** 2) / (-t)
    report = {
        "region_nodes": int(np.sum(mask)),
        "tolerance": tol,
        "threshold_f_squared": threshold,
        "vacuous": not bool(np.any(mask)),
    }
    if report["vacuous"]:
        report.update({"max_h_zz": math.nan, "worst_z": math.nan, "passed": True})
    else:
        vals = h_zz[mask]
        j = int(np.argmax(vals))
        report.update(
            {
                "max_h_zz": float(vals[j]),
                "worst_z": float(z[1:-1][mask][j]),
                "passed": bool(vals[j] <= tol),
            }
        )
    return report


def asymptotics_report(
    state: ProfileState, theta: float, collar_width: float = 2.0
) -> list[dict]:
    """Normalized residuals of the five collar/body estimates, with eta = 1.

    Each row reports max |left side| / envelope over the estimate's region:
      profile:    |F^2/2 + t + (z^2+2t)/(4L)|   vs (z^2 - t)/L      on F >= (theta/400) sqrt(-t)
      slope:      |F F_z + z/(2L)|              vs (|z|+sqrt(-t))/L on F >= (theta/200) sqrt(-t)
      higher:     F|F_zz| + F^2 |F_zzz|         vs 1/sqrt(L)        on F >= (theta/100) sqrt(-t)
      time_deriv: |1 + F F_t|                   vs 1/sqrt(L)        on F >= (theta/100) sqrt(-t)
      collar:     |1 - sqrt(L/(-t)) F |F_z||    vs 1                on collar_width sqrt((-t)/L) <= F <= 100 theta sqrt(-2t)
    where L = log(-t).  collar_width plays the role of the collar's inner
    threshold; 2.0 is admissible for eta = 1 because |1 - B B'| <= 1/2
    already holds on the steady cap for zbar >= 1.  Regions can be empty at
    moderate -t; such rows are flagged vacuous with max_residual NaN.
    """
    z, f, t = state.z_grid, state.f, state.t
    ell = math.log(-t)
    dz = state.dz
    fz = _first_derivative(f, dz)
    fzz = _second_derivative(f, dz)
    fzzz = _first_derivative(fzz, dz)
    f_t = rhs(state)
    sqt = math.sqrt(-t)

    rows = []

    def add_row(name, lhs, envelope, mask, region):
        row = {"name": name, "region": region, "node_count": int(np.sum(mask))}
        if not np.any(mask):
            row.update({"max_residual": math.nan, "worst_z": math.nan, "vacuous": True})
        else:
            resid = lhs[mask] / envelope[mask]
            j = int(np.argmax(resid))
            row.update(
                {
                    "max_residual": float(resid[j]),
                    "worst_z": float(z[mask][j]),
                    "vacuous": False,
                }
            )
        rows.append(row)

    add_row(
        "profile",
        np.abs(0.5 * f * f + t + (z * z + 2.0 * t) / (4.0 * ell)),
        (z * z - t) / ell,
        f >= (theta / 400.0) * sqt,
        f"F >= (theta/400) sqrt(-t), theta = {theta}",
    )
    add_row(
        "slope",
        np.abs(f * fz + z / (2.0 * ell)),
        (np.abs(z) + sqt) / ell,
        f >= (theta / 200.0) * sqt,
        f"F >= (theta/200) sqrt(-t), theta = {theta}",
    )
    add_row(
        "higher",
        f * np.abs(fzz) + f * f * np.abs(fzzz),
        np.full_like(f, 1.0 / math.sqrt(ell)),
        f >= (theta / 100.0) * sqt,
        f"F >= (theta/100) sqrt(-t), theta = {theta}",
    )
    add_row(
        "time_deriv",
        np.abs(1.0 + f * f_t),
        np.full_like(f, 1.0 / math.sqrt(ell)),
        f >= (theta / 100.0) * sqt,
        f"F >= (theta/100) sqrt(-t), theta = {theta}",
    )
    lower = collar_width * math.sqrt(-t / ell)
    upper = 100.0 * theta * math.sqrt(-2.0 * t)
    add_row(
        "collar",
        np.abs(1.0 - math.sqrt(ell / (-t)) * f * np.abs(fz)),
        np.ones_like(f),
        (f >= lower) & (f <= upper),
        f"{collar_width} sqrt((-t)/L) <= F <= 100 theta sqrt(-2t), theta = {theta}",
    )
    return rows


# ---------------------------------------------------------------------------
# snapshot CSV


def save_snapshot(state: ProfileState, path) -> None:
    """Write the snapshot as CSV: one header line, then z,F rows (%.17g)."""
    header = (
        f"# t={state.t:.17g} dz={state.dz:.17g} "
        f"tip_left={state.tip_left:.17g} tip_right={state.tip_right:.17g}"
    )
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for zi, fi in zip(state.z_grid, state.f):
            fh.write(f"{zi:.17g},{fi:.17g}\n")


_HEADER_RE = re.compile(
    r"^# t=(?P<t>\S+) dz=(?P<dz>\S+) tip_left=(?P<tl>\S+) tip_right=(?P<tr>\S+)\s*$"
)


def load_snapshot(path) -> ProfileState:
    """Read a snapshot CSV written by save_snapshot; bit-exact round trip."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty snapshot file")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise ValueError(f"{path}: line 1: malformed header {lines[0]!r}")
    t = float(m.group("t"))
    if not t < 0.0:
        raise ValueError(f"{path}: line 1: snapshot time must be negative, got t={t}")
    dz = float(m.group("dz"))
    zs, fs = [], []
    for k, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {k}: expected 'z,F', got {line!r}")
        try:
            zs.append(float(parts[0]))
            fs.append(float(parts[1]))
        except ValueError as err:
            raise ValueError(f"{path}: line {k}: {err}") from None
    if len(zs) < 8:
        raise ValueError(f"{path}: truncated snapshot: only {len(zs)} data rows")
    z = np.array(zs)
    f = np.array(fs)
    goi = int(np.argmin(np.abs(z)))
    if abs(z[goi]) > 1e-9 * dz:
        raise ValueError(f"{path}: gauge origin z=0 is not a grid node")
    state = ProfileState(
        t=t,
        z_grid=z,
        f=f,
        tip_left=float(m.group("tl")),
        tip_right=float(m.group("tr")),
        gauge_origin_index=goi,
    )
    validate_state(state)
    return state
