"""Dev: oval vs (0,0,gamma)-transform difference diagnostics, short window."""

import math
import time

import numpy as np

from ovalflow.bryant import arc_length_profile, solve_phi
from ovalflow.difference import (
    a_and_Q,
    build_diff_frame,
    compute_W,
    error_terms,
    overlap_consistency,
    pde_residual_check,
)
from ovalflow.profile_pde import EvolveConfig, build_initial_profile, evolve
from ovalflow.rescale import AdmissibleTriplet, apply_abg, solve_s_ode, tip_invert, to_cylindrical

t_start = time.time()

THETA = 0.05
GAMMA = 1e-3
TAU0 = -10.0
DTAU = 0.0125
N_EVAL = 9   # evaluation lattice k = 0..8
N_LAT = 11   # two margin snapshots beyond

taus = TAU0 + DTAU * np.arange(N_LAT)
ts = -np.exp(-taus)
t0 = float(ts[0])

phi = solve_phi(r_max=50.0, dr=1e-3)
curve = arc_length_profile(phi, z_max=60.0)
cfg = EvolveConfig(t0=t0, dz=1.5, snapshot_times=list(ts[1:-1]))
state0 = build_initial_profile(cfg, curve)
snaps = evolve(state0, cfg, t_end=float(ts[-1]))
print("run done: %d snaps, %.1fs" % (len(snaps), time.time() - t_start))

snap_at = {round(s.t, 6): s for s in snaps}
eval_ts = ts[:N_EVAL]
states1 = [snap_at[round(t, 6)] for t in eval_ts]

triplet = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=GAMMA,
                            t_star=float(eval_ts[-1]), epsilon=0.01)
stab = solve_s_ode(snaps, triplet)
states2 = apply_abg(snaps, triplet, stab, t_out=eval_ts)

frames1 = [to_cylindrical(s) for s in states1]
frames2 = [to_cylindrical(s) for s in states2]
diffs = [build_diff_frame(a, b, THETA) for a, b in zip(frames1, frames2)]
totals, cterms = [], []
for a, b, d in zip(frames1, frames2, diffs):
    totals.append(error_terms(a, b, d)["total"])
    cterms.append(error_terms(a, b, d, cutoff=True))
print("frames built, %.1fs" % (time.time() - t_start))

# --- size and linearity of H ---------------------------------------------
h_norm = [float(np.sqrt(np.trapezoid(np.exp(-d.xi_grid**2 / 4) * d.h**2, d.xi_grid)))
          for d in diffs]
print("||H|| at k=0..2:", h_norm[:3])

norms_gamma = []
for gam in (1e-2, 1e-3, 1e-4):
    tri = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=gam,
                            t_star=float(eval_ts[-1]), epsilon=0.01)
    st = apply_abg(snaps, tri, solve_s_ode(snaps, tri), t_out=eval_ts[4:5])
    dg = build_diff_frame(frames1[4], to_cylindrical(st[0]), THETA)
    norms_gamma.append(float(np.sqrt(np.trapezoid(
        np.exp(-dg.xi_grid**2 / 4) * dg.h**2, dg.xi_grid))))
print("gamma sweep norms:", norms_gamma,
      "ratios:", norms_gamma[0] / norms_gamma[1], norms_gamma[1] / norms_gamma[2])

# --- a(tau) against the self-similar prediction gamma/(8 tau^2) ----------
series = a_and_Q(diffs, cutoff_terms=cterms)
pred = GAMMA / (8.0 * taus[:N_EVAL] ** 2)
print("a:", series.a_series)
print("pred +-:", pred[0])
print("Q interior:", series.q_series[1:-1])
print("0.5*((-tau)^-1|a|):", 0.5 * np.abs(series.a_series[1:-1]) / (-taus[1:N_EVAL-1]))
dec = series.decomposition
print("decomposition max_gap:", dec["max_gap"])
print("I1-lead:", dec["I1_minus_lead"][1:-1])
print("I3-lead:", dec["I3_minus_lead"][1:-1])
print("lead:", dec["lead"][1:-1])

# --- PDE residual ----------------------------------------------------------
rep = pde_residual_check(diffs, totals)
print("pde residual: max %.3e (dtau=%.4g dxi=%.4g)" %
      (rep["max_residual"], rep["dtau"], rep["dxi"]))
print("rows:", [round(r["max_residual"], 10) for r in rep["rows"]][:4])

# --- tips: W and overlap ---------------------------------------------------
k = 4
s1, s2 = states1[k], states2[k]
lam = 1.0 / math.sqrt(-s1.t)
rho_hi = 0.56 * lam * float(np.max(s1.f))
rho_grid = rho_hi * np.arange(1, 801) / 800.0
tip1 = tip_invert(s1, +1, rho_grid=rho_grid)
tip2 = tip_invert(s2, +1, rho_grid=rho_grid)
wrep = compute_W(tip1, tip2)
print("W exponent: %.3f (n_fit=%d), max|W| = %.3e" %
      (wrep["exponent"], wrep["n_fit"], np.max(np.abs(wrep["w"]))))

orep = overlap_consistency(diffs[k], (tip1, tip2))
print("overlap:", {kk: (round(v, 8) if isinstance(v, float) else v)
                   for kk, v in orep.items()})

print("elapsed %.1fs" % (time.time() - t_start))
