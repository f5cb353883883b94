"""Two-solution differences in the cylindrical frame and the neutral-mode ODE.

Given a reference solution and a comparison solution (typically a gauge
transform of a second run), both expressed as cylindrical deviations
G(xi, tau), this module studies H = G1 - G2 and its smooth truncation
H_C = chi_C((-tau)^{-1/2} xi) H:

* ``error_terms`` evaluates the six fields E_1..E_6 through which H fails
  to satisfy the plain drift equation,  H_tau = L H + sum_k E_k,  where
  L f = f_xixi - (xi/2) f_xi + f.  Each field carries a factor of H or of
  an H-derivative, so all vanish when the two solutions coincide.  With
  ``cutoff=True`` the same formulas are emitted for H_C (the local factors
  switch to H_C, the two nonlocal fields acquire the cutoff as an outer
  factor while their integrands keep the raw H).
* ``pde_residual_check`` verifies that decomposition on a core region
  |xi| <= 2 across consecutive frames, with tau-derivatives by centered
  differences.
* ``a_and_Q`` tracks the neutral-mode coefficient
  a(tau) = (16 sqrt(2 pi))^{-1} <xi^2-2, H_C> and the ODE residual
  Q(tau) = da/dtau - 2 (-tau)^{-1} a(tau), optionally together with the
  mode-projected decomposition da/dtau = sum_k I_k in which I_1 and I_3
  each carry the leading part (-tau)^{-1} a.
* ``compute_W`` and ``overlap_consistency`` compare the tip parametrizations:
  W(rho) = V1(rho) - V2(rho) vanishes quadratically at the tip, and on the
  band where cylindrical and tip descriptions overlap the exact identity
  H_xi = -V1(rho_1) + V2(rho_2), rho_i = sqrt(2) + G_i, ties the two charts
  together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson
from scipy.interpolate import PchipInterpolator, make_interp_spline

from .rescale import SQRT2, CylindricalFrame, TipFrame
from .spectral import GaussFunction, project_modes, window_norms
from .weights import smooth_step

__all__ = [
    "DiffFrame",
    "DiffSeries",
    "chi_C",
    "build_diff_frame",
    "compute_W",
    "error_terms",
    "pde_residual_check",
    "a_and_Q",
    "overlap_consistency",
    "save_diff_frame",
    "save_diff_series",
]

PROJ_NORM = 16.0 * math.sqrt(2.0 * math.pi)

#: widest tau spacing allowed when forming Q by centered differences; Q is a
#: small difference of O(a/tau) quantities, so the sampling must be fine.
MAX_Q_SPACING = 0.05


def _cut_radii(theta: float) -> tuple[float, float]:
    if not 0.0 < theta <= 0.2:
        raise ValueError(f"theta must lie in (0, 0.2], got {theta}")
    return math.sqrt(4.0 - theta * theta / 2.0), math.sqrt(4.0 - theta * theta / 4.0)


def chi_C(x: np.ndarray | float, theta: float) -> np.ndarray | float:
    """Smooth even cutoff: 1 on [0, sqrt(4-theta^2/2)], 0 beyond sqrt(4-theta^2/4).

    Monotone decreasing in |x|; the transition uses the integrated bump
    switch shared with the tip weights, so chi_C is C-infinity.
    """
    inner, outer = _cut_radii(theta)
    u = (np.abs(np.asarray(x, dtype=float)) - inner) / (outer - inner)
    return (1.0 - smooth_step(u))[()]


# ---------------------------------------------------------------------------
# frames


@dataclass(eq=False)
class DiffFrame:
    """H and its cutoff H_C on a shared xi grid at one rescaled time."""

    tau: float
    xi_grid: np.ndarray
    h: np.ndarray
    h_c: np.ndarray
    theta: float

    def __post_init__(self):
        if not (len(self.xi_grid) == len(self.h) == len(self.h_c)):
            raise ValueError("xi_grid, h, h_c must have equal length")
        if np.any(np.diff(self.xi_grid) <= 0.0):
            raise ValueError("xi grid must be strictly increasing")
        if not self.tau < 0.0:
            raise ValueError("tau must be negative")
        _cut_radii(self.theta)
        if not (np.all(np.isfinite(self.h)) and np.all(np.isfinite(self.h_c))):
            raise ValueError("h and h_c must be finite")
        inner, outer = _cut_radii(self.theta)
        scale = math.sqrt(-self.tau)
        absxi = np.abs(self.xi_grid)
        flat = absxi <= inner * scale * (1.0 - 1e-12)
        if not np.array_equal(self.h_c[flat], self.h[flat]):
            raise ValueError("h_c must equal h inside the flat part of the cutoff")
        dead = absxi >= outer * scale * (1.0 + 1e-12)
        if np.any(self.h_c[dead] != 0.0):
            raise ValueError("h_c must vanish outside the cutoff support")


@dataclass(eq=False)
class DiffSeries:
    """a(tau), Q(tau) and windowed remainder norms along a run."""

    taus: np.ndarray
    a_series: np.ndarray
    q_series: np.ndarray
    energy_windows: dict
    decomposition: dict | None = None

    def __post_init__(self):
        if not (len(self.taus) == len(self.a_series) == len(self.q_series)):
            raise ValueError("taus, a_series, q_series must have equal length")
        d = np.diff(self.taus)
        if len(d) and (np.any(d <= 0.0) or not np.allclose(d, d[0], rtol=1e-6)):
            raise ValueError("taus must be uniformly increasing")
        if not np.all(np.isfinite(self.a_series)):
            raise ValueError("a series must be finite")


def _common_grid(
    frame1: CylindricalFrame, frame2: CylindricalFrame
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Restrict two same-time frames to their xi intersection.

    Returns (tau, xi, g1, g2) on frame1's nodes inside the overlap; frame2 is
    taken node-for-node when its grid aligns (the usual case: both frames come
    from profiles on the same z lattice) and resampled by a quintic spline
    otherwise.
    """
    if abs(frame1.tau - frame2.tau) > 1e-10:
        raise ValueError(
            f"frame error: tau mismatch {frame1.tau!r} vs {frame2.tau!r} "
            "exceeds 1e-10"
        )
    x1, x2 = frame1.xi_grid, frame2.xi_grid
    lo = max(x1[0], x2[0])
    hi = min(x1[-1], x2[-1])
    if lo >= hi:
        raise ValueError("frame error: xi ranges do not overlap")
    pad = 1e-12 * max(1.0, abs(lo), abs(hi))
    keep = (x1 >= lo - pad) & (x1 <= hi + pad)
    xi = x1[keep]
    if len(xi) < 8:
        raise ValueError("frame error: overlap contains fewer than 8 nodes")
    g1 = frame1.g[keep]

    dx2 = float(np.median(np.diff(x2)))
    j = np.searchsorted(x2, xi)
    j = np.clip(j, 1, len(x2) - 1)
    nearest = np.where(np.abs(x2[j - 1] - xi) <= np.abs(x2[j] - xi), j - 1, j)
    if np.all(np.abs(x2[nearest] - xi) <= 1e-6 * dx2):
        g2 = frame2.g[nearest]
    else:
        k = min(5, len(x2) - 1)
        if k % 2 == 0:
            k -= 1
        g2 = make_interp_spline(x2, frame2.g, k=k)(xi)
    return frame1.tau, xi.copy(), g1.copy(), g2


def build_diff_frame(
    frame1: CylindricalFrame, frame2: CylindricalFrame, theta: float
) -> DiffFrame:
    """H = G1 - G2 and H_C = chi_C((-tau)^{-1/2} xi) H on the grid overlap."""
    tau, xi, g1, g2 = _common_grid(frame1, frame2)
    h = g1 - g2
    chi = np.asarray(chi_C(xi / math.sqrt(-tau), theta))
    return DiffFrame(tau=tau, xi_grid=xi, h=h, h_c=chi * h, theta=theta)


# ---------------------------------------------------------------------------
# tip differences


def compute_W(tip1: TipFrame, tip2: TipFrame) -> dict:
    """W(rho) = V1 - V2 on a shared rho grid, with its vanishing rate at 0.

    The rate comes from a log-log fit of |W| against rho over the smallest
    resolved radii (one octave band above the first node); the fitted
    exponent should approach 2 when the two tips osculate.
    """
    if tip1.side != tip2.side:
        raise ValueError("argument error: tip frames are on different sides")
    r1, r2 = tip1.rho_grid, tip2.rho_grid
    if r1.shape != r2.shape or not np.allclose(r1, r2, rtol=1e-12, atol=1e-15):
        raise ValueError("argument error: tip frames must share a rho grid")
    w = tip1.v - tip2.v

    rho = r1
    mask = (rho <= 8.0 * rho[0]) & (np.abs(w) > 1e-300)
    if int(np.count_nonzero(mask)) >= 3:
        slope, _ = np.polyfit(np.log(rho[mask]), np.log(np.abs(w[mask])), 1)
        exponent = float(slope)
        note = ""
    else:
        exponent = float("nan")
        note = "insufficient signal for a vanishing-rate fit"
    return {
        "rho": rho.copy(),
        "w": w,
        "exponent": exponent,
        "n_fit": int(np.count_nonzero(mask)),
        "note": note,
    }


# ---------------------------------------------------------------------------
# error terms


def error_terms(
    frame1: CylindricalFrame,
    frame2: CylindricalFrame,
    diff: DiffFrame,
    cutoff: bool = False,
) -> dict:
    """The six fields through which H (or H_C) misses the plain drift equation.

    With ``cutoff=False`` these satisfy H_tau = L H + sum_k E_k.  With
    ``cutoff=True`` the local factors use H_C and the two nonlocal fields are
    multiplied by chi_C, which is the H_C version of the same decomposition up
    to commutator terms supported in the cutoff transition band (not emitted
    here; their mode projections are weight-suppressed).

    Derivatives are central differences; the running integrals are cumulative
    trapezoid sums anchored at xi = 0, exactly as the fields are written.
    """
    tau, xi, g1, g2 = _common_grid(frame1, frame2)
    if (
        abs(tau - diff.tau) > 1e-10
        or len(xi) != len(diff.xi_grid)
        or not np.allclose(xi, diff.xi_grid, rtol=0.0, atol=1e-12)
    ):
        raise ValueError("diff frame does not match the two input frames")

    s1 = SQRT2 + g1
    s2 = SQRT2 + g2
    if np.min(s1) <= 0.0 or np.min(s2) <= 0.0:
        raise ValueError("degenerate frame: sqrt(2) + G <= 0 somewhere")

    i0 = int(np.argmin(np.abs(xi)))
    if abs(xi[i0]) > 1e-9:
        raise ValueError("integrals are anchored at xi = 0; grid must contain it")

    g1x = np.gradient(g1, xi, edge_order=2)
    g2x = np.gradient(g2, xi, edge_order=2)
    h = diff.h
    hx = np.gradient(h, xi, edge_order=2)
    if cutoff:
        hm = diff.h_c
        hmx = np.gradient(diff.h_c, xi, edge_order=2)
        chi = np.asarray(chi_C(xi / math.sqrt(-tau), diff.theta))
    else:
        hm, hmx = h, hx
        chi = np.ones_like(xi)

    def cum(y: np.ndarray) -> np.ndarray:
        c = cumulative_trapezoid(y, xi, initial=0.0)
        return c - c[i0]

    inv12 = 1.0 / (s1 * s2)
    e1 = (inv12 - 0.5) * hm
    e2 = inv12 * np.square(g1x) * hm
    e3 = -(g1x + g2x) / s2 * hmx
    e4 = 2.0 * (g1x[i0] / s1[i0] - cum(np.square(g1x) / np.square(s1))) * hmx
    e5 = chi * (
        2.0 * g2x * hx[i0] / s1[i0]
        - 2.0 * g2x * g2x[i0] * h[i0] / (s1[i0] * s2[i0])
    )
    e6 = (
        chi
        * 2.0
        * g2x
        * (
            -cum((g1x + g2x) * hx / np.square(s2))
            + cum(
                (2.0 * SQRT2 + g1 + g2)
                * h
                * np.square(g1x)
                / (np.square(s1) * np.square(s2))
            )
        )
    )
    total = e1 + e2 + e3 + e4 + e5 + e6
    return {
        "xi": xi,
        "E1": e1,
        "E2": e2,
        "E3": e3,
        "E4": e4,
        "E5": e5,
        "E6": e6,
        "total": total,
    }


# ---------------------------------------------------------------------------
# PDE residual across consecutive frames


def _uniform_spacing(taus: np.ndarray, what: str) -> float:
    d = np.diff(taus)
    if np.any(d <= 0.0):
        raise ValueError(f"{what} must be strictly increasing")
    if not np.allclose(d, d[0], rtol=1e-6):
        raise ValueError(f"{what} must be uniformly spaced")
    return float(np.mean(d))


def pde_residual_check(
    diffs: Sequence[DiffFrame],
    error_totals: Sequence[np.ndarray],
    xi_core: float = 2.0,
) -> dict:
    """Max over |xi| <= xi_core of |H_tau - L H - sum_k E_k| per interior time.

    ``error_totals[k]`` is the ``"total"`` field of :func:`error_terms` for
    the pair behind ``diffs[k]``, on that frame's own grid.  Frames are
    resampled onto one shared core grid (quintic splines) because the xi
    lattice breathes with tau; H_tau is a centered difference, the drift
    operator uses explicit 3-point stencils.  Expected size O(dtau + dxi^2).
    """
    if len(diffs) < 3:
        raise ValueError("window error: need at least 3 consecutive frames")
    if len(error_totals) != len(diffs):
        raise ValueError("one error-term total per frame is required")
    taus = np.array([d.tau for d in diffs], dtype=float)
    dtau = _uniform_spacing(taus, "frame times")

    dxi = float(np.median(np.diff(diffs[len(diffs) // 2].xi_grid)))
    n = int(math.floor(xi_core / dxi + 1e-9)) + 2
    grid = dxi * np.arange(-n, n + 1)

    h_mat = np.empty((len(diffs), len(grid)))
    e_mat = np.empty_like(h_mat)
    for k, (d, tot) in enumerate(zip(diffs, error_totals)):
        if len(tot) != len(d.xi_grid):
            raise ValueError("error-term total does not match its frame grid")
        if d.xi_grid[0] > grid[0] or d.xi_grid[-1] < grid[-1]:
            raise ValueError("frame does not cover the core region")
        h_mat[k] = make_interp_spline(d.xi_grid, d.h, k=5)(grid)
        e_mat[k] = make_interp_spline(d.xi_grid, tot, k=5)(grid)

    core = np.abs(grid) <= xi_core + 1e-12
    rows = []
    worst = 0.0
    for k in range(1, len(diffs) - 1):
        h_tau = (h_mat[k + 1] - h_mat[k - 1]) / (2.0 * dtau)
        h = h_mat[k]
        d1 = np.empty_like(h)
        d2 = np.empty_like(h)
        d1[1:-1] = (h[2:] - h[:-2]) / (2.0 * dxi)
        d2[1:-1] = (h[2:] - 2.0 * h[1:-1] + h[:-2]) / (dxi * dxi)
        d1[0] = d1[-1] = d2[0] = d2[-1] = np.nan
        res = h_tau - (d2 - 0.5 * grid * d1 + h) - e_mat[k]
        row_max = float(np.max(np.abs(res[core])))
        rows.append({"tau": float(taus[k]), "max_residual": row_max})
        worst = max(worst, row_max)
    return {
        "dtau": dtau,
        "dxi": dxi,
        "xi_core": xi_core,
        "rows": rows,
        "max_residual": worst,
    }


# ---------------------------------------------------------------------------
# neutral mode series


def _pad_symmetric(diff: DiffFrame, x_target: float = 30.0) -> GaussFunction:
    """h_c on a symmetric grid extended by zeros until |xi| >= x_target.

    The cutoff support must sit inside the symmetric part of the frame's own
    grid; the zero tails only push the quadrature window out far enough that
    whole-line moment normalizations apply.
    """
    xi = diff.xi_grid
    i0 = int(np.argmin(np.abs(xi)))
    if abs(xi[i0]) > 1e-9:
        raise ValueError("frame grid must contain xi = 0")
    n_side = min(i0, len(xi) - 1 - i0)
    sl = slice(i0 - n_side, i0 + n_side + 1)
    edge = min(-xi[i0 - n_side], xi[i0 + n_side])
    outside = (np.abs(xi) > edge * (1.0 + 1e-12)) & (diff.h_c != 0.0)
    if np.any(outside):
        raise ValueError("cutoff support exceeds the symmetric part of the grid")

    xs = xi[sl] - xi[i0]  # recenter so the grid is exactly symmetric
    vals = diff.h_c[sl]
    dxi = float(np.median(np.diff(xs)))
    if xs[-1] < x_target:
        m = int(math.ceil((x_target - xs[-1]) / dxi))
        right = xs[-1] + dxi * np.arange(1, m + 1)
        xs = np.concatenate([-right[::-1], xs, right])
        vals = np.concatenate([np.zeros(m), vals, np.zeros(m)])
    return GaussFunction(xi_grid=xs, values=vals)


def a_and_Q(
    diffs: Sequence[DiffFrame],
    cutoff_terms: Sequence[dict] | None = None,
) -> DiffSeries:
    """Neutral-mode coefficient a(tau) and ODE residual Q(tau) along a run.

    a comes from projecting h_c onto xi^2 - 2; Q(tau) = da/dtau -
    2 (-tau)^{-1} a by centered differences (NaN at the series ends).  When
    ``cutoff_terms`` (the ``cutoff=True`` output of :func:`error_terms`, one
    dict per frame) is supplied, the same projection is applied to each field
    to give the decomposition da/dtau = sum_k I_k, and I_1, I_3 are compared
    against their shared leading part (-tau)^{-1} a.  Windowed norms of the
    remainder after removing the neutral projection are attached whenever the
    series spans at least one unit of tau.
    """
    if len(diffs) < 3:
        raise ValueError("window error: need at least 3 frames for Q")
    taus = np.array([d.tau for d in diffs], dtype=float)
    dtau = _uniform_spacing(taus, "frame times")
    if dtau > MAX_Q_SPACING + 1e-12:
        raise ValueError(
            f"tau spacing {dtau:.6g} too coarse for Q (needs <= {MAX_Q_SPACING})"
        )

    padded = [_pad_symmetric(d) for d in diffs]
    coeffs = [project_modes(p) for p in padded]
    a = np.array([c.a for c in coeffs], dtype=float)

    q = np.full_like(a, np.nan)
    da = np.full_like(a, np.nan)
    da[1:-1] = (a[2:] - a[:-2]) / (2.0 * dtau)
    q[1:-1] = da[1:-1] - 2.0 * a[1:-1] / (-taus[1:-1])

    decomposition = None
    if cutoff_terms is not None:
        if len(cutoff_terms) != len(diffs):
            raise ValueError("one cutoff error-term dict per frame is required")
        i_mat = np.empty((6, len(diffs)))
        for k, (d, terms) in enumerate(zip(diffs, cutoff_terms)):
            xi = terms["xi"]
            if len(xi) != len(d.xi_grid):
                raise ValueError("cutoff terms do not match their frame grid")
            wgt = np.exp(-np.square(xi) / 4.0) * (np.square(xi) - 2.0)
            for j in range(6):
                i_mat[j, k] = simpson(wgt * terms[f"E{j + 1}"], x=xi) / PROJ_NORM
        lead = a / (-taus)
        gap = da - i_mat.sum(axis=0)
        finite = np.isfinite(gap)
        decomposition = {
            "I": i_mat,
            "lead": lead,
            "gap": gap,
            "max_gap": float(np.max(np.abs(gap[finite]))) if finite.any() else float("nan"),
            "I1_minus_lead": i_mat[0] - lead,
            "I3_minus_lead": i_mat[2] - lead,
        }

    span = taus[-1] - taus[0]
    if span >= 1.0 - 1e-9 and dtau <= 0.1 + 1e-12:
        rem = []
        for p, c in zip(padded, coeffs):
            vals = p.values - math.sqrt(2.0) * c.a * (np.square(p.xi_grid) - 2.0)
            rem.append(GaussFunction(xi_grid=p.xi_grid, values=vals))
        windows = window_norms(taus, rem, tau_star=float(taus[-1]))
    else:
        windows = {
            "H_window_sup": float("nan"),
            "D_window_sup": float("nan"),
            "note": "series spans less than one unit tau window",
        }
    return DiffSeries(
        taus=taus,
        a_series=a,
        q_series=q,
        energy_windows=windows,
        decomposition=decomposition,
    )


# ---------------------------------------------------------------------------
# overlap band between cylindrical and tip descriptions


def overlap_consistency(diff: DiffFrame, tips: tuple[TipFrame, TipFrame]) -> dict:
    """Cross-check the cylindrical difference against the tip charts.

    On the band sqrt(4 - 400 theta^2) (-tau)^{1/2} <= |xi| <=
    sqrt(4 - theta^2/100) (-tau)^{1/2} the slope identity
    H_xi = side * (-V1(rho_1) + V2(rho_2)), rho_i = sqrt(2) + G_i(xi), holds
    exactly; it is verified to interpolation tolerance.  On the same band
    |H_xi + side * W(rho_1)| <= C |H| with C fitted from the data; C should
    track the measured slope max |dV2/drho| there.
    """
    tip1, tip2 = tips
    if tip1.side != tip2.side:
        raise ValueError("argument error: tip frames are on different sides")
    side = tip1.side
    for t in tips:
        if abs(t.tau - diff.tau) > 1e-10 * max(1.0, abs(diff.tau)):
            raise ValueError("argument error: tip frames not at the diff frame time")

    theta = diff.theta
    scale = math.sqrt(-diff.tau)
    lo_sq = 4.0 - 400.0 * theta * theta
    hi = math.sqrt(4.0 - theta * theta / 100.0) * scale
    if lo_sq <= 0.0:
        return {"vacuous": True, "note": "band empty: 400 theta^2 >= 4"}
    lo = math.sqrt(lo_sq) * scale

    xi = diff.xi_grid
    if side > 0:
        band = (xi >= lo) & (xi <= hi)
    else:
        band = (xi <= -lo) & (xi >= -hi)

    # restrict to where both tip charts cover the band
    maps = []
    for t in tips:
        order = np.argsort(t.xi_of_rho)
        maps.append(PchipInterpolator(t.xi_of_rho[order], t.rho_grid[order]))
        band &= (xi >= t.xi_of_rho.min()) & (xi <= t.xi_of_rho.max())
    if not np.any(band):
        return {
            "vacuous": True,
            "note": "band empty on this grid / tip coverage",
            "band": (lo, hi),
        }

    xb = xi[band]
    h = diff.h[band]
    hx = np.gradient(diff.h, xi, edge_order=2)[band]
    rho1 = np.asarray(maps[0](xb))
    rho2 = np.asarray(maps[1](xb))
    v1 = PchipInterpolator(tip1.rho_grid, tip1.v)
    v2 = PchipInterpolator(tip2.rho_grid, tip2.v)

    identity_residual = float(np.max(np.abs(hx - side * (-v1(rho1) + v2(rho2)))))

    w_at_rho1 = v1(rho1) - v2(rho1)
    lhs = np.abs(hx + side * w_at_rho1)
    sig = np.abs(h) > 1e-13 * max(1.0, float(np.max(np.abs(diff.h))))
    c_fitted = float(np.max(lhs[sig] / np.abs(h[sig]))) if sig.any() else float("nan")

    dv2 = np.gradient(tip2.v, tip2.rho_grid, edge_order=2)
    r_lo = float(min(rho1.min(), rho2.min()))
    r_hi = float(max(rho1.max(), rho2.max()))
    in_band = (tip2.rho_grid >= r_lo) & (tip2.rho_grid <= r_hi)
    slope_bound = float(np.max(np.abs(dv2[in_band]))) if in_band.any() else float("nan")

    return {
        "vacuous": False,
        "band": (lo, hi),
        "n_nodes": int(np.count_nonzero(band)),
        "identity_residual": identity_residual,
        "c_fitted": c_fitted,
        "slope_bound": slope_bound,
        "ratio": c_fitted / slope_bound if slope_bound else float("nan"),
    }


# ---------------------------------------------------------------------------
# persistence


def save_diff_frame(diff: DiffFrame, path) -> None:
    """CSV of one frame: xi, h, h_c with tau and theta in the header."""
    lines = [
        f"# tau={diff.tau:.17g} theta={diff.theta:.17g}",
        "# columns: xi,h,h_c",
    ]
    for x, h, hc in zip(diff.xi_grid, diff.h, diff.h_c):
        lines.append(f"{x:.17g},{h:.17g},{hc:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def save_diff_series(series: DiffSeries, path) -> None:
    """CSV of the run: tau, a, Q rows with window norms in the header."""
    win = series.energy_windows
    lines = [
        "# columns: tau,a,q",
        f"# H_window_sup={win.get('H_window_sup', float('nan')):.17g} "
        f"D_window_sup={win.get('D_window_sup', float('nan')):.17g}",
    ]
    if "note" in win:
        lines.append(f"# note: {win['note']}")
    for t, a, q in zip(series.taus, series.a_series, series.q_series):
        lines.append(f"{t:.17g},{a:.17g},{q:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
