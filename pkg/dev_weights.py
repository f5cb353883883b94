import math
import time

import numpy as np

from ovalflow.bryant import phi_at, solve_phi
from ovalflow.profile_pde import EvolveConfig, build_initial_profile
from ovalflow.bryant import arc_length_profile
from ovalflow.rescale import TipFrame, tip_invert
from ovalflow.weights import (
    WeightTable,
    build_mu,
    fit_k_emp,
    mu_gradient_check,
    poincare_tip_check,
    random_admissible_functions,
    zeta,
    zeta_prime,
)

t0 = time.time()
tab = solve_phi()
theta = 0.05

# --- zeta shape ---------------------------------------------------------------
r = np.linspace(0.0, 0.4 * theta, 2001)
zv = zeta(r, theta)
assert np.all(zv[r <= theta / 8.0] == 0.0)
assert np.all(zv[r >= theta / 4.0] == 1.0)
assert np.all(np.diff(zv) >= 0.0)
# derivative consistency
zp = zeta_prime(r, theta)
num = np.gradient(zv, r, edge_order=2)
mid = (r > theta / 8.0 * 1.05) & (r < theta / 4.0 * 0.95)
rel = np.max(np.abs(zp[mid] - num[mid]) / np.max(zp))
print("zeta' vs numeric:", rel)
assert rel < 1e-4

# --- synthetic deep frame at tau = -1e6 ----------------------------------------
# V = sqrt(Phi(sqrt(-tau) rho)) in the cap, xi^2 = 2(2-rho^2)(-tau) + 2 body-like
tau_deep = -1.0e6
rt = math.sqrt(-tau_deep)
rho = np.geomspace(theta / 400.0, 2.2 * theta, 900)
v_cap = np.sqrt(phi_at(tab, rt * rho))
xi2 = 2.0 * (2.0 - rho**2) * (-tau_deep) + 2.0
frame = TipFrame(side=+1, rho_grid=rho, v=v_cap, xi_of_rho=np.sqrt(xi2), tau=tau_deep)

wt = build_mu(frame, theta, tab)
print("weight table rows:", len(wt.rho_grid), "mu range:", wt.mu.min(), wt.mu.max())

# --- examples: node-exactness -------------------------------------------------
xi_interp = lambda x: np.interp(x, rho, np.sqrt(xi2))
for probe in (theta, theta / 2.0):
    j = int(np.argmin(np.abs(wt.rho_grid - probe)))
    expect = -frame.xi_of_rho[np.argmin(np.abs(rho - wt.rho_grid[j]))] ** 2 / 4.0
    got = wt.mu[j]
    print(f"mu({wt.rho_grid[j]:.6g}) = {got:.10g} vs -xi^2/4 = {expect:.10g}")
    assert abs(got - expect) < 1e-9 * abs(expect)
# node-exact for ALL rho >= theta/4
sel = wt.rho_grid >= theta / 4.0
expect = -np.interp(wt.rho_grid[sel], rho, xi2) / 4.0
err = np.max(np.abs(wt.mu[sel] - expect) / np.abs(expect))
print("node-exact rel err above theta/4:", err)
assert err < 1e-12

# mu <= 0 below theta/4 (and at theta/16 in particular)
sel2 = wt.rho_grid <= theta / 4.0
print("max mu below theta/4:", np.max(wt.mu[sel2]))
assert np.max(wt.mu[sel2]) <= 0.0

# --- C^1 across the seams -----------------------------------------------------
# mu_rho from the table vs numerical gradient of mu: fine everywhere incl seams
num_mr = np.gradient(wt.mu, wt.rho_grid, edge_order=2)
scale = np.max(np.abs(wt.mu_rho))
seam = (wt.rho_grid > theta / 10.0) & (wt.rho_grid < theta / 3.0)
rel = np.max(np.abs(num_mr[seam] - wt.mu_rho[seam])) / scale
print("mu_rho vs grad(mu) near seams (rel):", rel)
assert rel < 5e-3  # geomspace grid is coarse for gradients; quadrature tol below

# --- quadrature halving stability ----------------------------------------------
wt2 = build_mu(frame, theta, tab, n_quad=8193)
rel = np.max(np.abs(wt2.mu - wt.mu) / np.maximum(np.abs(wt.mu), 1e-300))
print("mu change under quadrature doubling:", rel)
assert rel < 1e-6

# --- gradient check: eta <= 0.5 on the deep synthetic frame ---------------------
rep = mu_gradient_check(wt, frame)
print("gradient check:", rep)
assert not rep["vacuous"]
assert rep["eta"] <= 0.5

# vacuous on V == 1
frame_flat = TipFrame(
    side=+1,
    rho_grid=rho,
    v=np.ones_like(rho),
    xi_of_rho=np.sqrt(xi2),
    tau=tau_deep,
)
wt_flat = build_mu(frame_flat, theta, tab)
rep_flat = mu_gradient_check(wt_flat, frame_flat)
print("vacuous check:", rep_flat)
assert rep_flat["vacuous"]

# --- K_emp and the Poincare suite ----------------------------------------------
k_emp = fit_k_emp(wt)
print("K_emp (deep frame):", k_emp)

rng = np.random.default_rng(20260817)
funcs = random_admissible_functions(theta, 100, rng)
fails = 0
for f, fp in funcs:
    res = poincare_tip_check(wt, f, fp, k_star=k_emp)
    if not res["ok"]:
        fails += 1
print("poincare violations (100 fns):", fails)
assert fails == 0

# INFINITE_RHS path
res = poincare_tip_check(wt, lambda r: np.ones_like(r), lambda r: np.zeros_like(r), k_emp)
print("constant fn verdict:", res["verdict"])
assert res["verdict"] == "INFINITE_RHS"

# --- oval frame at tau=-10: build, gradient report, poincare -------------------
curve = arc_length_profile(tab, z_max=60.0)
mt = math.exp(10.0)
cfg = EvolveConfig(t0=-mt, dz=0.0316 * math.sqrt(mt / 10.0))
oval = build_initial_profile(cfg, curve)
fr_o = tip_invert(oval, +1, rho_grid=np.geomspace(theta / 400.0, 2.2 * theta, 900))
wt_o = build_mu(fr_o, theta, tab)
rep_o = mu_gradient_check(wt_o, fr_o)
k_o = fit_k_emp(wt_o)
print("oval tau=-10: eta =", rep_o, "K_emp =", k_o)
fails = 0
worst = 0.0
for f, fp in funcs:
    res = poincare_tip_check(wt_o, f, fp, k_star=k_o)
    if not res["ok"]:
        fails += 1
    if math.isfinite(res["rhs"]) and res["rhs"] > 0:
        worst = max(worst, res["lhs"] / res["rhs"])
print("oval poincare violations:", fails, "worst lhs/rhs:", worst)
assert fails == 0

# --- mirror: left-side frame gives the same table -------------------------------
fr_l = tip_invert(oval, -1, rho_grid=np.geomspace(theta / 400.0, 2.2 * theta, 900))
wt_l = build_mu(fr_l, theta, tab)
print("mirror mu diff:", np.max(np.abs(wt_l.mu - wt_o.mu)))
assert np.max(np.abs(wt_l.mu - wt_o.mu)) < 1e-9

print("elapsed:", time.time() - t0)
