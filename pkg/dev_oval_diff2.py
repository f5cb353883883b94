"""Dev: is Q discretization-dominated? Refine dz, lengthen burn-in."""

import math
import sys
import time

import numpy as np

from ovalflow.bryant import arc_length_profile, solve_phi
from ovalflow.difference import a_and_Q, build_diff_frame, error_terms, pde_residual_check
from ovalflow.profile_pde import EvolveConfig, build_initial_profile, evolve
from ovalflow.rescale import AdmissibleTriplet, apply_abg, solve_s_ode, to_cylindrical
from ovalflow.spectral import project_modes
from ovalflow.difference import _pad_symmetric

THETA = 0.05
GAMMA = 1e-3
TAU0 = -10.0

phi = solve_phi(r_max=50.0, dr=1e-3)
curve = arc_length_profile(phi, z_max=60.0)


def run_case(dz, dtau, tau_end, label, n_eval=9, eval_from_end=True):
    t_start = time.time()
    n_lat = int(round((tau_end - TAU0) / dtau)) + 3  # margin beyond
    taus = TAU0 + dtau * np.arange(n_lat)
    ts = -np.exp(-taus)
    cfg = EvolveConfig(t0=float(ts[0]), dz=dz, snapshot_times=list(ts[1:-1]))
    state0 = build_initial_profile(cfg, curve)
    snaps = evolve(state0, cfg, t_end=float(ts[-1]))
    snap_at = {round(s.t, 6): s for s in snaps}

    k_end = int(round((tau_end - TAU0) / dtau))
    ks = range(k_end - n_eval + 1, k_end + 1) if eval_from_end else range(n_eval)
    eval_ts = np.array([ts[k] for k in ks])
    states1 = [snap_at[round(t, 6)] for t in eval_ts]
    triplet = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=GAMMA,
                                t_star=float(eval_ts[-1]), epsilon=0.01)
    stab = solve_s_ode(snaps, triplet)
    states2 = apply_abg(snaps, triplet, stab, t_out=eval_ts)
    frames1 = [to_cylindrical(s) for s in states1]
    frames2 = [to_cylindrical(s) for s in states2]
    diffs = [build_diff_frame(a, b, THETA) for a, b in zip(frames1, frames2)]
    totals = [error_terms(a, b, d)["total"]
              for a, b, d in zip(frames1, frames2, diffs)]
    series = a_and_Q(diffs)
    rep2 = pde_residual_check(diffs, totals, xi_core=2.0)
    rep5 = pde_residual_check(diffs, totals, xi_core=5.0)
    mid = len(diffs) // 2
    c = project_modes(_pad_symmetric(diffs[mid]))
    print(f"[{label}] dz={dz} dtau={dtau} window tau=[{eval_ts[0]!r}] "
          f"tau_mid={diffs[mid].tau:.4f}  ({time.time()-t_start:.1f}s)")
    print("   a:", np.array2string(series.a_series, precision=4))
    print("   Q:", np.array2string(series.q_series[1:-1], precision=4))
    print("   lead:", np.array2string(series.a_series[1:-1] /
                                      (-series.taus[1:-1]), precision=4))
    print("   c0=%.4e c1=%.4e a=%.4e rem=%.4e" % (c.c0, c.c1, c.a, c.remainder_norm_H))
    print("   residual core2=%.3e core5=%.3e" %
          (rep2["max_residual"], rep5["max_residual"]))
    return series


which = sys.argv[1] if len(sys.argv) > 1 else "all"

if which in ("all", "base"):
    run_case(1.5, 0.0125, -9.9, "base", eval_from_end=False)
if which in ("all", "fine"):
    run_case(1.0, 0.0125, -9.9, "fine-dz", eval_from_end=False)
if which in ("all", "burn"):
    run_case(1.5, 0.025, -9.65, "burn-in", n_eval=9, eval_from_end=True)
