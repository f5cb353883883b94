import math
import time

import numpy as np

from ovalflow import exact
from ovalflow.bryant import arc_length_profile, phi_at, solve_phi
from ovalflow.profile_pde import EvolveConfig, build_initial_profile
from ovalflow.rescale import (
    AdmissibleTriplet,
    STable,
    apply_abg,
    check_admissible,
    from_cylindrical,
    solve_s_ode,
    tip_invert,
    to_cylindrical,
)

t0 = time.time()

# --- example: cylinder -> G == 0 -------------------------------------------
st = exact.cylinder_profile(-25.0, z_half=30.0, dz=0.05)
fr = to_cylindrical(st)
print("cylinder max|G|:", np.max(np.abs(fr.g)))
assert np.max(np.abs(fr.g)) < 1e-14

# --- example: sphere at its max -> G = 2 - sqrt(2) ---------------------------
st = exact.sphere_profile(-25.0, z_half=8.0, dz=0.05)
fr = to_cylindrical(st)
g0 = fr.g[np.argmin(np.abs(fr.xi_grid))]
print("sphere G at max:", g0, "expect", 2.0 - math.sqrt(2.0))
assert abs(g0 - (2.0 - math.sqrt(2.0))) < 1e-12

# --- roundtrip ---------------------------------------------------------------
t_b, z_b, f_b = from_cylindrical(fr)
print("roundtrip errs:", abs(t_b - st.t), np.max(np.abs(z_b - st.z_grid)), np.max(np.abs(f_b - st.f)))
assert abs(t_b - st.t) < 1e-12 * abs(st.t)
assert np.max(np.abs(f_b - st.f)) < 1e-12

# --- oval initial data at log(-t0) = 10 --------------------------------------
tab = solve_phi()
curve = arc_length_profile(tab, z_max=60.0)
mt = math.exp(10.0)
c = math.sqrt(mt / 10.0)
cfg = EvolveConfig(t0=-mt, dz=0.0316 * c)
oval = build_initial_profile(cfg, curve)
fro = to_cylindrical(oval)
g_center = fro.g[np.argmin(np.abs(fro.xi_grid))]
print("oval G(0):", g_center, "expect", math.sqrt(2.1) - math.sqrt(2.0))
assert abs(g_center - (math.sqrt(2.1) - math.sqrt(2.0))) < 2e-4

# --- tip_invert: default grid, V -> 1 as rho -> 0 ----------------------------
tf = tip_invert(oval, +1)
print("tip frame: rho range", tf.rho_grid[0], tf.rho_grid[-1], "V[0]:", tf.v[0], "V[-1]:", tf.v[-1])
assert tf.v[0] > 0.999
small = tip_invert(oval, +1, rho_grid=np.array([1e-4, 1e-3, 1e-2]))
print("V at tiny rho:", small.v)
assert small.v[0] > 1.0 - 1e-7 and small.v[1] > 1.0 - 1e-6

# --- tip_invert: xi^2 / (2(2-rho^2)(-tau)) in [0.8, 1.2] for rho in [th/8, 2th]
theta = 0.05
band = np.linspace(theta / 8.0, 2.0 * theta, 25)
tfb = tip_invert(oval, +1, rho_grid=band)
ratio = tfb.xi_of_rho**2 / (2.0 * (2.0 - band**2) * 10.0)
print("xi^2 ratio range:", ratio.min(), ratio.max())
assert np.all((ratio > 0.8) & (ratio < 1.2))

# left side mirror
tfl = tip_invert(oval, -1, rho_grid=band)
print("left xi:", tfl.xi_of_rho[:3], "mirror err:", np.max(np.abs(tfl.xi_of_rho + tfb.xi_of_rho)))
assert np.max(np.abs(tfl.xi_of_rho + tfb.xi_of_rho)) < 1e-8
assert np.max(np.abs(tfl.v - tfb.v)) < 1e-8

# --- transition band: V*sqrt(-tau) in [1/C, C] on rho in [th/100, 100th] ^ range
rho_cap = 0.45 * np.max(oval.f) / math.sqrt(mt)
hi = min(100.0 * theta, rho_cap)
band2 = np.geomspace(theta / 100.0, hi, 60)
tf2 = tip_invert(oval, +1, rho_grid=band2)
vals = tf2.v * math.sqrt(10.0)
print("V*sqrt(-tau): min", vals.min(), "max", vals.max(), "C =", max(vals.max(), 1.0 / vals.min()))

# --- V vs Bryant: |V^-2 - Phi(sqrt(-tau) rho)^-1| <= eta (V^-2 - 1), rho <= 10 th
band3 = np.linspace(theta / 8.0, 10.0 * theta, 40)
tf3 = tip_invert(oval, +1, rho_grid=band3)
lhs = np.abs(tf3.v**-2 - 1.0 / phi_at(tab, math.sqrt(10.0) * band3))
rhs = tf3.v**-2 - 1.0
eta = np.max(lhs / rhs)
print("V-vs-Bryant eta on initial oval:", eta)

# --- consistency: calling tip_invert again reproduces V ----------------------
tf3b = tip_invert(oval, +1, rho_grid=band3)
assert np.array_equal(tf3.v, tf3b.v)

# --- rho_max > limit -> range error ------------------------------------------
try:
    tip_invert(oval, +1, rho_max=1.01 * np.max(oval.f) / math.sqrt(mt))
    raise SystemExit("expected range error")
except ValueError as e:
    print("range error OK:", e)

# --- admissibility ------------------------------------------------------------
tr = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=1e-3, t_star=-mt, epsilon=0.01)
print("admissible gamma=1e-3:", check_admissible(tr))
assert check_admissible(tr)
bad = AdmissibleTriplet(alpha=2.0 * math.sqrt(mt), beta=0.0, gamma=0.0, t_star=-mt, epsilon=0.01)
assert not check_admissible(bad)

# --- s-ODE on a cylinder series: s == alpha ----------------------------------
times = np.linspace(-30.0, -20.0, 11)
cyl_series = [exact.cylinder_profile(t, z_half=25.0, dz=0.05) for t in times]
alpha = 0.02 * math.sqrt(20.0)
trc = AdmissibleTriplet(alpha=alpha, beta=0.0, gamma=0.0, t_star=-20.0, epsilon=0.05)
stab = solve_s_ode(cyl_series, trc)
print("cylinder s range:", stab.s.min(), stab.s.max(), "alpha:", alpha)
assert np.max(np.abs(stab.s - alpha)) < 1e-12 * (1 + abs(alpha))

# alpha = 0 -> s == 0
tr0 = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=0.0, t_star=-20.0, epsilon=0.05)
st0 = solve_s_ode(cyl_series, tr0)
assert np.all(st0.s == 0.0)
print("alpha=0 -> s identically 0 OK")

print("elapsed so far:", time.time() - t0)

# --- apply_abg identity on cylinder series -----------------------------------
ident = apply_abg(cyl_series, tr0)
src = cyl_series[:-1] + [cyl_series[-1]]
print("identity count:", len(ident))
for a, b in zip(ident, [s for s in cyl_series if s.t <= -20.0]):
    assert a.t == b.t
    # grids may be trimmed differently (window path); compare on overlap
    ja = np.searchsorted(a.z_grid, b.z_grid[0])
    err = 0.0
    ovl = np.intersect1d(np.round(a.z_grid / a.dz).astype(int), np.round(b.z_grid / b.dz).astype(int))
    ia = np.searchsorted(np.round(a.z_grid / a.dz).astype(int), ovl)
    ib = np.searchsorted(np.round(b.z_grid / b.dz).astype(int), ovl)
    err = np.max(np.abs(a.f[ia] - b.f[ib]))
    assert err == 0.0, err
print("identity bitwise OK on overlap")

# --- apply_abg beta-shift on cylinder: closed form ----------------------------
beta = 0.5
trb = AdmissibleTriplet(alpha=0.0, beta=beta, gamma=0.0, t_star=-21.0, epsilon=0.05)
shifted = apply_abg(cyl_series, trb)
for s in shifted:
    expect = math.sqrt(-2.0 * (s.t - beta))
    err = np.max(np.abs(s.f - expect))
    assert err < 1e-10, (s.t, err)
print("beta-shift closed form OK,", len(shifted), "states")

# --- apply_abg gamma on cylinder: e^{g/2} sqrt(-2 e^{-g} t) = sqrt(-2t) -------
trg = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=0.05, t_star=-21.0, epsilon=0.05)
gam = apply_abg(cyl_series, trg)
for s in gam:
    expect = math.sqrt(-2.0 * s.t)  # cylinder is gamma-invariant
    err = np.max(np.abs(s.f - expect))
    assert err < 1e-10, (s.t, err)
print("gamma invariance on cylinder OK,", len(gam), "states")

# --- group composition on cylinder: beta1 then beta2 = beta1+beta2 ------------
trb1 = AdmissibleTriplet(alpha=0.0, beta=0.3, gamma=0.0, t_star=-21.0, epsilon=0.05)
once = apply_abg(cyl_series, trb1)
trb2 = AdmissibleTriplet(alpha=0.0, beta=0.2, gamma=0.0, t_star=-22.0, epsilon=0.05)
twice = apply_abg(once, trb2)
for s in twice:
    expect = math.sqrt(-2.0 * (s.t - 0.5))
    err = np.max(np.abs(s.f - expect))
    assert err < 1e-9, (s.t, err)
print("beta composition OK,", len(twice), "states")

# --- sphere series: apply_abg with tips, gamma scaling ------------------------
sp_times = np.linspace(-30.0, -20.0, 11)
sp_series = [exact.sphere_dome(t, dz=0.05) for t in sp_times]
trg2 = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=0.02, t_star=-21.0, epsilon=0.05)
sp_out = apply_abg(sp_series, trg2)
eg = math.exp(-0.02)
for s in sp_out[:3] + sp_out[-1:]:
    # arc-length sphere F = R cos(z/R), R = sqrt(-4t): gamma-invariant family
    R = exact.sphere_radius(s.t)
    expect = R * np.cos(s.z_grid / R)
    err = np.max(np.abs(s.f - expect))
    print("  sphere gamma t=", s.t, "err", err)
    assert err < 2e-4, (s.t, err)
print("sphere gamma invariance OK")

# time-interpolation error should drop ~16x when snapshot spacing halves
errs = []
for n in (11, 21):
    tt = np.linspace(-30.0, -20.0, n)
    ser = [exact.sphere_dome(t, dz=0.05) for t in tt]
    # probe where halving the spacing also halves the position-in-interval
    # fraction (2/3 -> 1/3), so the quartic local error contracts cleanly
    outs = apply_abg(ser, trg2, t_out=np.array([-23.8047]))
    s = outs[0]
    R = exact.sphere_radius(s.t)
    mask = np.abs(s.z_grid) < 8.0
    errs.append(np.max(np.abs(s.f - R * np.cos(s.z_grid / R))[mask]))
print("interp-in-t errors at dt=1, 0.5:", errs, "ratio", errs[0] / errs[1])
assert errs[0] / errs[1] > 8.0

print("total elapsed:", time.time() - t0)
