"""Steady soliton profile Phi(r): axis series, ODE solve, arc-length form.

The rotationally symmetric steady gradient soliton on R^3 is described by a
profile Phi(r) > 0 solving

    Phi Phi'' - Phi'^2 / 2 + (1 - Phi) (r Phi' + 2 Phi) / r^2 = 0,

smooth at the axis with Phi(0) = 1.  Substituting a power series at r = 0
gives

    Phi(r) = 1 - r^2/6 + r^4/90 - r^6/3780 + O(r^8),

and matching at infinity gives the far-field law

    Phi(r) = r^-2 + 2 r^-4 + O(r^-6).

The equation has a removable singularity at the axis, so the solve is seeded
slightly off-axis from the series and integrated with a high-order adaptive
scheme; a second pass at loosened tolerance guards against silent integrator
failure.  Tables are consumed through shape-preserving (monotone cubic)
interpolation, with the far-field law taking over beyond the tabulated range.

The arc-length form B(z), defined by dB/dz = sqrt(Phi(B)), B(0) = 0, gives the
soliton radius as a function of distance z from the tip.  B^2 grows like 2z,
and (B^2)'' = B Phi'(B) + 2 Phi(B) crosses zero at a single radius B_*: for
B > B_* the squared radius is concave in arc length.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

__all__ = [
    "PhiTable",
    "BryantCurve",
    "solve_phi",
    "phi_at",
    "phi_prime_at",
    "eval_chi",
    "phi_residual",
    "table_report",
    "arc_length_profile",
    "b_at",
    "z_of_b",
    "concavity_threshold",
    "save_phi_table",
    "load_phi_table",
]

# Axis series Phi = 1 + C2 r^2 + C4 r^4 + C6 r^6 + O(r^8).  The ODE recursion
# fixes C4 = 2 C2^2 / 5 and C6 = C2 C4 / 7 from C2 = -1/6.
_C2 = -1.0 / 6.0
_C4 = 1.0 / 90.0
_C6 = -1.0 / 3780.0

# Near the axis chi = (Phi^-1 - 1)/r^2 = 1/6 + r^2/60 + r^4/840 + O(r^6);
# below this radius the series is more accurate than the table quotient.
_CHI_SERIES_RADIUS = 0.05

_SEED_RADIUS = 1e-3  # off-axis seed radius for the ODE integration


def _series_phi(r):
    r2 = np.square(r)
    return 1.0 + r2 * (_C2 + r2 * (_C4 + r2 * _C6))


def _series_phi_prime(r):
    r2 = np.square(r)
    return r * (2.0 * _C2 + r2 * (4.0 * _C4 + 6.0 * _C6 * r2))


def _profile_rhs(r, y):
    phi, dphi = y
    ddphi = (0.5 * dphi * dphi - (1.0 - phi) * (r * dphi + 2.0 * phi) / (r * r)) / phi
    return (dphi, ddphi)


@dataclass(eq=False)
class PhiTable:
    """Uniform-grid table of the soliton profile and its first derivative."""

    r_grid: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    r_max: float

    @property
    def dr(self) -> float:
        return float(self.r_grid[1] - self.r_grid[0])

    @functools.cached_property
    def _phi_interp(self) -> PchipInterpolator:
        return PchipInterpolator(self.r_grid, self.phi, extrapolate=False)

    @functools.cached_property
    def _phi_prime_interp(self) -> PchipInterpolator:
        return PchipInterpolator(self.r_grid, self.phi_prime, extrapolate=False)


@dataclass(eq=False)
class BryantCurve:
    """Arc-length form of the soliton: radius B and slope B' on a z grid."""

    z_grid: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    @functools.cached_property
    def _b_interp(self) -> PchipInterpolator:
        return PchipInterpolator(self.z_grid, self.b, extrapolate=False)

    @functools.cached_property
    def _z_interp(self) -> PchipInterpolator:
        # B is strictly increasing, so the (b, z) table inverts the curve.
        return PchipInterpolator(self.b, self.z_grid, extrapolate=False)


def solve_phi(r_max: float = 50.0, dr: float = 1e-3) -> PhiTable:
    """Integrate the profile ODE on [0, r_max] onto a uniform table.

    Seeds at min(1e-3, dr) from the axis series, integrates with DOP853 at
    tight tolerance, and cross-checks against a loosened-tolerance pass.
    """
    if dr <= 0.0:
        raise ValueError(f"dr must be positive, got {dr}")
    if r_max < max(10.0 * dr, 1.0):
        raise ValueError(f"r_max={r_max} too small for dr={dr}")
    n = int(round(r_max / dr))
    r_grid = np.linspace(0.0, n * dr, n + 1)

    r_seed = min(_SEED_RADIUS, dr)
    y_seed = (float(_series_phi(r_seed)), float(_series_phi_prime(r_seed)))
    tail = r_grid > r_seed * (1.0 + 1e-12)

    sol = solve_ivp(
        _profile_rhs,
        (r_seed, r_grid[-1]),
        y_seed,
        method="DOP853",
        t_eval=r_grid[tail],
        rtol=1e-12,
        atol=1e-14,
    )
    if not sol.success:
        raise RuntimeError(f"profile ODE integration failed: {sol.message}")

    phi = np.empty_like(r_grid)
    phi_prime = np.empty_like(r_grid)
    phi[~tail] = _series_phi(r_grid[~tail])
    phi_prime[~tail] = _series_phi_prime(r_grid[~tail])
    phi[tail] = sol.y[0]
    phi_prime[tail] = sol.y[1]

    # Independent-trajectory guard: a loosened-tolerance solve must agree.
    check_nodes = r_grid[tail][:: max(1, int(tail.sum()) // 32)]
    check = solve_ivp(
        _profile_rhs,
        (r_seed, r_grid[-1]),
        y_seed,
        method="DOP853",
        t_eval=check_nodes,
        rtol=1e-9,
        atol=1e-11,
    )
    drift = np.max(np.abs(check.y[0] - phi[tail][:: max(1, int(tail.sum()) // 32)]))
    if not check.success or drift > 1e-7:
        raise RuntimeError(f"integrator cross-check failed (drift {drift:.3e})")

    if phi[0] != 1.0 or not np.all((phi[1:] > 0.0) & (phi[1:] < 1.0)):
        raise RuntimeError("profile left the unit interval; integration unusable")

    return PhiTable(r_grid=r_grid, phi=phi, phi_prime=phi_prime, r_max=float(r_grid[-1]))


def _eval_scalar_or_array(r, fn):
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    out = fn(arr)
    return float(out[0]) if np.ndim(r) == 0 else out


def phi_at(tab: PhiTable, r):
    """Phi(r) for r >= 0; beyond the table uses the far-field law r^-2 + 2 r^-4."""

    def _eval(arr):
        if np.any(arr < 0.0):
            raise ValueError("Phi is only defined for r >= 0")
        out = np.empty_like(arr)
        inside = arr <= tab.r_max
        out[inside] = tab._phi_interp(arr[inside])
        far = ~inside
        if np.any(far):
            r2 = np.square(arr[far])
            out[far] = (1.0 + 2.0 / r2) / r2
        return out

    return _eval_scalar_or_array(r, _eval)


def phi_prime_at(tab: PhiTable, r):
    """Phi'(r) for r >= 0, with far-field law -2 r^-3 - 8 r^-5 beyond the table."""

    def _eval(arr):
        if np.any(arr < 0.0):
            raise ValueError("Phi is only defined for r >= 0")
        out = np.empty_like(arr)
        inside = arr <= tab.r_max
        out[inside] = tab._phi_prime_interp(arr[inside])
        far = ~inside
        if np.any(far):
            r3 = arr[far] ** 3
            out[far] = -2.0 / r3 - 8.0 / (r3 * np.square(arr[far]))
        return out

    return _eval_scalar_or_array(r, _eval)


def eval_chi(tab: PhiTable, r):
    """chi(r) = (Phi(r)^-1 - 1) / r^2 on [0, r_max].

    chi increases from 1/6 at the axis to 1 at infinity; Phi^-1 - 1 >= r^2/6
    follows.  Near the axis the quotient is 0/0, so the series takes over.
    Raises ValueError outside the tabulated range.
    """

    def _eval(arr):
        if np.any(arr < 0.0) or np.any(arr > tab.r_max):
            raise ValueError(f"chi requested outside the tabulated range [0, {tab.r_max}]")
        out = np.empty_like(arr)
        near = arr < _CHI_SERIES_RADIUS
        r2 = np.square(arr[near])
        out[near] = 1.0 / 6.0 + r2 / 60.0 + np.square(r2) / 840.0
        rest = ~near
        phi = tab._phi_interp(arr[rest])
        out[rest] = (1.0 / phi - 1.0) / np.square(arr[rest])
        return out

    return _eval_scalar_or_array(r, _eval)


def phi_residual(tab: PhiTable) -> np.ndarray:
    """Pointwise ODE residual on interior nodes, Phi'' by central differences.

    The axis node is excluded: the (1 - Phi)/r^2 factor is a removable 0/0
    there.  The result is O(dr^2 * Phi'''') for a correct table.
    """
    dr = tab.dr
    r = tab.r_grid[1:-1]
    phi = tab.phi[1:-1]
    dphi = tab.phi_prime[1:-1]
    ddphi = (tab.phi[2:] - 2.0 * tab.phi[1:-1] + tab.phi[:-2]) / dr**2
    return phi * ddphi - 0.5 * dphi**2 + (1.0 - phi) * (r * dphi + 2.0 * phi) / r**2


def table_report(tab: PhiTable) -> dict:
    """Invariant summary for a solved table.

    Reports the max ODE residual against its finite-difference bound, the
    positivity/monotonicity flags, and K = sup r^2/(Phi^-1 - 1) = 1/min(chi),
    the constant in the global lower bound Phi^-1 - 1 >= r^2 / K.
    """
    res = phi_residual(tab)
    dr = tab.dr
    ddphi = np.diff(tab.phi, 2) / dr**2
    chi = eval_chi(tab, tab.r_grid)
    return {
        "phi_axis_exact": bool(tab.phi[0] == 1.0),
        "phi_in_unit_interval": bool(np.all((tab.phi[1:] > 0.0) & (tab.phi[1:] < 1.0))),
        "monotone_decreasing": bool(np.all(np.diff(tab.phi) < 0.0)),
        "max_residual": float(np.max(np.abs(res))),
        "residual_bound": float(10.0 * dr**2 * np.max(np.abs(ddphi))),
        "k_phi": float(1.0 / np.min(chi)),
        "chi_min": float(np.min(chi)),
        "chi_max": float(np.max(chi)),
    }


def arc_length_profile(tab: PhiTable, z_max: float, dz: float = 1e-2) -> BryantCurve:
    """Solve dB/dz = sqrt(Phi(B)), B(0) = 0 on [0, z_max].

    The equation is regular at z = 0 (B'(0) = 1).  B may run past tab.r_max,
    where sqrt(Phi) switches to the far-field law.
    """
    if z_max <= 0.0 or dz <= 0.0:
        raise ValueError("z_max and dz must be positive")
    n = int(round(z_max / dz))
    z_grid = np.linspace(0.0, n * dz, n + 1)

    sol = solve_ivp(
        lambda _z, y: (np.sqrt(phi_at(tab, y[0])),),
        (0.0, z_grid[-1]),
        (0.0,),
        method="DOP853",
        t_eval=z_grid,
        rtol=1e-12,
        atol=1e-14,
    )
    if not sol.success:
        raise RuntimeError(f"arc-length integration failed: {sol.message}")
    b = sol.y[0]
    b[0] = 0.0
    return BryantCurve(z_grid=z_grid, b=b, b_prime=np.sqrt(phi_at(tab, b)))


def b_at(curve: BryantCurve, z):
    """Interpolated radius B(z); raises outside the solved range."""

    def _eval(arr):
        out = curve._b_interp(arr)
        if np.any(np.isnan(out)):
            raise ValueError("B requested outside the solved z range")
        return out

    return _eval_scalar_or_array(z, _eval)


def z_of_b(curve: BryantCurve, b):
    """Inverse map z(B) of the strictly increasing radius function."""

    def _eval(arr):
        out = curve._z_interp(arr)
        if np.any(np.isnan(out)):
            raise ValueError("z(B) requested outside the solved B range")
        return out

    return _eval_scalar_or_array(b, _eval)


def concavity_threshold(tab: PhiTable) -> float:
    """Radius B_* where (B^2)'' = B Phi'(B) + 2 Phi(B) crosses zero.

    The combination starts at 2 on the axis and decays to -4 B^-4 in the far
    field, so a unique crossing exists once the table reaches far enough.
    """
    g = tab.r_grid * tab.phi_prime + 2.0 * tab.phi
    sign_change = np.flatnonzero((g[:-1] > 0.0) & (g[1:] <= 0.0))
    if sign_change.size == 0:
        raise ValueError(
            "no sign change of B Phi' + 2 Phi on [0, r_max]; "
            "extend the grid (increase r_max)"
        )
    i = int(sign_change[0])
    return brentq(
        lambda r: r * phi_prime_at(tab, r) + 2.0 * phi_at(tab, r),
        tab.r_grid[i],
        tab.r_grid[i + 1],
        xtol=1e-13,
    )


def save_phi_table(tab: PhiTable, path) -> None:
    """Write the table as CSV (r, phi, phi_prime) at 17 significant digits."""
    data = np.column_stack([tab.r_grid, tab.phi, tab.phi_prime])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header="r,phi,phi_prime", comments="")


def load_phi_table(path) -> PhiTable:
    """Read a table written by save_phi_table; round-trips bit-for-bit."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError(f"malformed profile table in {path}")
    return PhiTable(
        r_grid=data[:, 0],
        phi=data[:, 1],
        phi_prime=data[:, 2],
        r_max=float(data[-1, 0]),
    )
