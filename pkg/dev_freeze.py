"""Dev: compute the numbers frozen into test_profile_pde / test_exact."""

import math
import time

import numpy as np

from ovalflow import exact
from ovalflow.bryant import arc_length_profile, b_at, solve_phi
from ovalflow.profile_pde import (
    EvolveConfig,
    ProfileState,
    StepFailure,
    asymptotics_report,
    build_initial_profile,
    concavity_monitor,
    evolve,
    nonlocal_integral,
    rhs,
    scalar_curvature,
    step,
    tip_scalar_curvature,
)

t_start = time.time()
tab = solve_phi()
curve = arc_length_profile(tab, z_max=60.0)

# --- rhs oracles -------------------------------------------------------------
st = exact.cylinder_profile(-8.0, z_half=6.0, dz=0.05)
r = rhs(st)
print("cylinder rhs dev:", np.max(np.abs(r - (-1.0 / math.sqrt(16.0)))))

st = exact.sphere_profile(-25.0, z_half=8.0, dz=0.05)
a = exact.sphere_radius(-25.0)
ft = (-2.0 / a) * (np.cos(st.z_grid / a) + (st.z_grid / a) * np.sin(st.z_grid / a))
print("sphere rhs dev:", np.max(np.abs(rhs(st) - ft)))

# nonlocal integral on F = cos z (F_zz/F = -1 -> integral = -z)
dz = 0.01
n = int(round(1.2 / dz))
z = dz * np.arange(-n, n + 1)
stc = ProfileState(t=-1.0, z_grid=z, f=np.cos(z), tip_left=math.nan,
                   tip_right=math.nan, gauge_origin_index=n)
print("nonlocal cos dev:", np.max(np.abs(nonlocal_integral(stc) - (-z))))

# F = sqrt(2+z^2): F_zz/F = 2/(2+z^2)^2; int_0^z = z/(2(2+z^2)) + atan(z/sqrt2)/(2 sqrt2)
f2 = np.sqrt(2.0 + z * z)
st2 = ProfileState(t=-1.0, z_grid=z, f=f2, tip_left=math.nan,
                   tip_right=math.nan, gauge_origin_index=n)
expect = z / (2.0 * (2.0 + z * z)) + np.arctan(z / math.sqrt(2.0)) / (2.0 * math.sqrt(2.0))
print("nonlocal sqrt dev:", np.max(np.abs(nonlocal_integral(st2) - expect)))

# --- criterion 3 vehicles ------------------------------------------------------
for dzv in (0.02, 0.01, 0.005):
    z_half = 10.0
    nn = int(math.floor((z_half - 0.45 * dzv) / dzv))
    zz = dzv * np.arange(-nn, nn + 1)
    f = b_at(curve, z_half - np.abs(zz))
    stb = ProfileState(t=-1.0, z_grid=zz, f=np.asarray(f), tip_left=-z_half,
                       tip_right=z_half, gauge_origin_index=nn)
    rl, rr = tip_scalar_curvature(stb)
    print(f"bryant tip R at dz={dzv}: left {rl!r} right {rr!r}")

stcyl = exact.cylinder_profile(-1.0, z_half=6.0, dz=0.05)
rc = scalar_curvature(stcyl)
print("cylinder R-1 max:", np.max(np.abs(rc - 1.0)))

for dzv in (0.002, 0.001):
    dome = exact.sphere_dome(-0.25, dz=dzv)
    rl, rr = tip_scalar_curvature(dome)
    print(f"unit sphere dome dz={dzv}: R tips {rl!r} {rr!r} (expect 6)")

# --- criterion 4 convergence ---------------------------------------------------
def run_window(make_state, bc, t0, t1, dzv):
    cfg = EvolveConfig(t0=t0, dz=dzv, boundary_values=bc)
    s = make_state(t0, dzv)
    out = evolve(s, cfg, t1)
    return out[-1]

errs_c = []
for dzv in (0.05, 0.025, 0.0125):
    fin = run_window(lambda t, d: exact.cylinder_profile(t, 6.0, d),
                     exact.cylinder_boundary, -2.0, -1.0, dzv)
    errs_c.append(float(np.max(np.abs(fin.f - exact.cylinder_radius(-1.0)))))
print("cylinder errors:", errs_c,
      "orders:", [math.log2(errs_c[i] / errs_c[i + 1]) for i in range(2)])

errs_s = []
for dzv in (0.05, 0.025, 0.0125):
    fin = run_window(lambda t, d: exact.sphere_profile(t, 2.5, d),
                     exact.sphere_boundary(2.5), -2.0, -1.0, dzv)
    a1 = exact.sphere_radius(-1.0)
    errs_s.append(float(np.max(np.abs(fin.f - a1 * np.cos(fin.z_grid / a1)))))
print("sphere errors:", errs_s,
      "orders:", [math.log2(errs_s[i] / errs_s[i + 1]) for i in range(2)])
print("elapsed:", time.time() - t_start)

# dome with tips, dz=0.05, t -2 -> -1
cfg = EvolveConfig(t0=-2.0, dz=0.05)
dome = exact.sphere_dome(-2.0, dz=0.05)
out = evolve(dome, cfg, -1.0)
fin = out[-1]
a1 = exact.sphere_radius(-1.0)
err = float(np.max(np.abs(fin.f - a1 * np.cos(fin.z_grid / a1))))
print("dome evolve error (dz=0.05):", err, "tips:", fin.tip_left, fin.tip_right,
      "expect +-", 0.5 * math.pi * a1)

# --- concavity monitor on synthetic states -------------------------------------
L0 = 4.639081878851933  # 2 B*
mon = concavity_monitor(exact.cylinder_profile(-1.0e5, 600.0, 1.0), L0)
print("cylinder deep monitor:", mon)
mon = concavity_monitor(exact.sphere_dome(-1.0e5, 1.0), L0)
print("sphere deep monitor:", {k: mon[k] for k in
      ("region_nodes", "max_h_zz", "worst_z", "passed", "vacuous")})
mon = concavity_monitor(exact.cylinder_profile(-100.0, 30.0, 0.1), L0)
print("cylinder shallow monitor vacuous:", mon["vacuous"], mon["passed"])

# --- oval initial state: asymptotics + monitor + tip ratio ----------------------
mt = math.exp(10.0)
cfg = EvolveConfig(t0=-mt, dz=1.5)
oval = build_initial_profile(cfg, curve)
rep = asymptotics_report(oval, 0.05)
for row in rep:
    print("oval asym row:", row["name"], repr(row["max_residual"]), row["node_count"], row["vacuous"])
mon = concavity_monitor(oval, L0)
print("oval monitor:", mon["vacuous"], mon["passed"], mon["region_nodes"])
rl, rr = tip_scalar_curvature(oval)
print("oval tip ratio at t0:", rl * mt / 10.0, rr * mt / 10.0)

# --- StepFailure trigger ---------------------------------------------------------
try:
    s = exact.sphere_profile(-0.02, 0.15, 0.01)
    cfg = EvolveConfig(t0=-0.02, dz=0.01, boundary_values=exact.sphere_boundary(0.15))
    evolve(s, cfg, -1e-7)
    print("NO FAILURE (unexpected)")
except StepFailure as e:
    print("StepFailure OK:", e, "| diag state t:", e.diagnostic_state.t if e.diagnostic_state else None)
except ValueError as e:
    print("ValueError instead:", e)

print("total elapsed:", time.time() - t_start)
