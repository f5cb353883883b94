"""Dev: Q/((-tau)^{-1} a) for the (0,0,gamma) pair as the start deepens."""

import math
import time

import numpy as np

from ovalflow.bryant import arc_length_profile, solve_phi
from ovalflow.difference import a_and_Q, build_diff_frame
from ovalflow.profile_pde import EvolveConfig, build_initial_profile, evolve
from ovalflow.rescale import AdmissibleTriplet, apply_abg, solve_s_ode, to_cylindrical

GAMMA = 1e-3
THETA = 0.05
phi = solve_phi(r_max=50.0, dr=1e-3)
curve = arc_length_profile(phi, z_max=60.0)

for L0 in (10.0, 12.0, 14.0, 17.0, 20.0):
    t_start = time.time()
    tau0 = -L0
    dz = 0.01 * math.exp(L0 / 2.0)  # keeps dxi ~ 0.01
    dtau = 0.0125
    taus = tau0 + dtau * np.arange(11)
    ts = -np.exp(-taus)
    cfg = EvolveConfig(t0=float(ts[0]), dz=dz, snapshot_times=list(ts[1:-1]))
    state0 = build_initial_profile(cfg, curve)
    snaps = evolve(state0, cfg, t_end=float(ts[-1]))
    snap_at = {round(s.t / abs(ts[0]), 12): s for s in snaps}
    eval_ts = ts[:9]
    states1 = [snap_at[round(t / abs(ts[0]), 12)] for t in eval_ts]
    triplet = AdmissibleTriplet(alpha=0.0, beta=0.0, gamma=GAMMA,
                                t_star=float(eval_ts[-1]), epsilon=0.01)
    stab = solve_s_ode(snaps, triplet)
    states2 = apply_abg(snaps, triplet, stab, t_out=eval_ts)
    diffs = [build_diff_frame(to_cylindrical(s1), to_cylindrical(s2), THETA)
             for s1, s2 in zip(states1, states2)]
    series = a_and_Q(diffs)
    a = series.a_series
    q = series.q_series[1:-1]
    lead = a[1:-1] / (-series.taus[1:-1])
    print("L0=%.0f  a_mid=%.4e  a*8L^2/gamma=%.3f  max|Q|=%.3e  "
          "max|Q|/lead=%.2f  (%.0fs)" %
          (L0, a[4], a[4] * 8 * L0 * L0 / GAMMA, np.max(np.abs(q)),
           np.max(np.abs(q) / lead), time.time() - t_start))
