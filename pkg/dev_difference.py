"""Dev checks for difference.py against closed-form pairs."""

import math
import time

import numpy as np

from ovalflow.difference import (
    DiffFrame,
    a_and_Q,
    build_diff_frame,
    chi_C,
    compute_W,
    error_terms,
    overlap_consistency,
    pde_residual_check,
    save_diff_frame,
    save_diff_series,
)
from ovalflow.exact import cylinder_beta_g
from ovalflow.rescale import SQRT2, CylindricalFrame

t0 = time.time()
THETA = 0.05

# --- chi_C shape ---------------------------------------------------------
inner = math.sqrt(4.0 - THETA**2 / 2.0)
outer = math.sqrt(4.0 - THETA**2 / 4.0)
assert chi_C(0.0, THETA) == 1.0
assert chi_C(inner, THETA) == 1.0
assert chi_C(outer, THETA) == 0.0
assert chi_C(2.5, THETA) == 0.0
x = np.linspace(0.0, 2.2, 2001)
vals = np.asarray(chi_C(x, THETA))
assert np.all(np.diff(vals) <= 1e-15)
assert np.allclose(np.asarray(chi_C(-x, THETA)), vals)
v19 = chi_C(1.9, 0.1)
assert 0.0 < v19 <= 1.0
print("chi_C shape OK; chi_C(1.9, 0.1) =", v19)

# --- synthetic cylinder beta-pair at tau = -20 ---------------------------
TAU = -20.0
BETA = 1.0e6
dxi = 0.01
n = int(round(12.0 / dxi))
xi = dxi * np.arange(-n, n + 1)


def make_pair(tau):
    gshift = cylinder_beta_g(tau, BETA)
    f1 = CylindricalFrame(tau=tau, xi_grid=xi, g=np.full_like(xi, gshift))
    f2 = CylindricalFrame(tau=tau, xi_grid=xi, g=np.zeros_like(xi))
    return f1, f2


f1, f2 = make_pair(TAU)
diff = build_diff_frame(f1, f2, THETA)
h_expect = math.sqrt(2.0 * (1.0 + BETA * math.exp(TAU))) - SQRT2
assert np.allclose(diff.h, h_expect, rtol=0, atol=1e-15), np.max(np.abs(diff.h - h_expect))
print("beta-pair H const =", h_expect)

# identical pair
d0 = build_diff_frame(f1, f1, THETA)
assert np.all(d0.h == 0.0) and np.all(d0.h_c == 0.0)
terms0 = error_terms(f1, f1, d0)
assert all(np.all(terms0[f"E{k}"] == 0.0) for k in range(1, 7))
print("identical pair: H, E_k all zero")

# E-terms on the beta-pair: E2..E6 vanish, E1 closed form
terms = error_terms(f1, f2, diff)
for k in (2, 3, 4, 5, 6):
    m = np.max(np.abs(terms[f"E{k}"]))
    assert m < 1e-14, (k, m)
s1 = SQRT2 + cylinder_beta_g(TAU, BETA)
e1_expect = (1.0 / (s1 * SQRT2) - 0.5) * h_expect
assert np.allclose(terms["E1"], e1_expect, rtol=1e-12)
print("beta-pair E1 closed form OK; E2..E6 = 0")

# PDE residual: H_tau = H + E1 for the pair; three frames at dtau = 0.05
for dtau, label in ((0.05, "dtau=0.05"), (0.025, "dtau=0.025")):
    taus = TAU + dtau * np.arange(-1, 2)
    diffs, totals = [], []
    for tk in taus:
        a, b = make_pair(tk)
        dk = build_diff_frame(a, b, THETA)
        diffs.append(dk)
        totals.append(error_terms(a, b, dk)["total"])
    rep = pde_residual_check(diffs, totals)
    print(f"beta-pair residual {label}: {rep['max_residual']:.3e}"
          f"  envelope {10*(dtau+dxi**2):.3e}")
    assert rep["max_residual"] <= 10.0 * (dtau + dxi**2)
    if dtau == 0.05:
        r_coarse = rep["max_residual"]
    else:
        r_fine = rep["max_residual"]
print("halving factor:", r_coarse / r_fine)
assert r_coarse / r_fine >= 1.8

# a and Q on the beta-pair: a ~ 0 (constant orthogonal to xi^2-2)
taus = TAU + 0.05 * np.arange(-2, 3)
diffs, cterms = [], []
for tk in taus:
    a, b = make_pair(tk)
    dk = build_diff_frame(a, b, THETA)
    diffs.append(dk)
    cterms.append(error_terms(a, b, dk, cutoff=True))
series = a_and_Q(diffs, cutoff_terms=cterms)
print("beta-pair max|a| =", np.max(np.abs(series.a_series)))
assert np.max(np.abs(series.a_series)) <= 1e-10
assert np.isnan(series.q_series[0]) and np.isnan(series.q_series[-1])
assert np.max(np.abs(series.q_series[1:-1])) <= 1e-9
assert "note" in series.energy_windows  # span 0.2 < 1
dec = series.decomposition
print("beta-pair decomposition max_gap =", dec["max_gap"])

# projection idempotence: a from reconstruction equals a
from ovalflow.difference import _pad_symmetric
from ovalflow.spectral import GaussFunction, project_modes

g = _pad_symmetric(diffs[2])
a_val = project_modes(g).a
recon = GaussFunction(xi_grid=g.xi_grid,
                      values=math.sqrt(2.0) * a_val * (g.xi_grid**2 - 2.0))
a_back = project_modes(recon).a
assert abs(a_back - a_val) <= 1e-10 * max(1.0, abs(a_val)), (a_val, a_back)

# beta-pair spectral split: c1 = 0, remainder tiny
c = project_modes(_pad_symmetric(diffs[2]))
print("beta-pair c0, c1, a, rem:", c.c0, c.c1, c.a, c.remainder_norm_H)
assert abs(c.c1) < 1e-14 and abs(c.a) < 1e-10
assert c.remainder_norm_H < 1e-7 * max(1.0, abs(c.c0))

# --- synthetic gamma-like sweep: linearity of build_diff_frame -----------
norms = []
for gam in (1e-2, 1e-3, 1e-4):
    fg = CylindricalFrame(tau=TAU, xi_grid=xi, g=gam * np.cos(xi / 3.0))
    dg = build_diff_frame(fg, f2, THETA)
    norms.append(np.sqrt(np.trapezoid(np.exp(-xi**2 / 4) * dg.h**2, xi)))
print("sweep norms:", norms, "ratios:", norms[0] / norms[1], norms[1] / norms[2])
assert abs(norms[0] / norms[1] - 10.0) < 1e-6
assert abs(norms[1] / norms[2] - 10.0) < 1e-6

# --- tau mismatch / grid intersection ------------------------------------
try:
    build_diff_frame(CylindricalFrame(tau=TAU + 1e-6, xi_grid=xi, g=np.zeros_like(xi)), f2, THETA)
    raise SystemExit("tau mismatch not caught")
except ValueError as err:
    assert "tau mismatch" in str(err)

sub = CylindricalFrame(tau=TAU, xi_grid=xi[300:-300], g=np.zeros(len(xi) - 600))
dsub = build_diff_frame(f1, sub, THETA)
assert len(dsub.xi_grid) == len(xi) - 600
assert dsub.xi_grid[0] == xi[300]

# offset grid (forces spline path)
xi_off = xi[:-1] + dxi / 3.0
off = CylindricalFrame(tau=TAU, xi_grid=xi_off, g=np.zeros_like(xi_off))
doff = build_diff_frame(f1, off, THETA)
assert np.allclose(doff.h, h_expect, atol=1e-12)
print("intersection/offset grids OK")

# --- CSV round style ------------------------------------------------------
save_diff_frame(diff, "/tmp/df.csv")
save_diff_series(series, "/tmp/ds.csv")
with open("/tmp/df.csv") as fh:
    head = fh.readline()
assert head.startswith("# tau=")
print("csv written")

print("elapsed %.2fs" % (time.time() - t0))
