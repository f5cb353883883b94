"""Command-line driver: run the checks and write CSV reports.

Five subcommands cover the toolkit end to end:

  bryant             solve the steady profile and check its invariants
  evolve             run the oval initial data and save snapshots
  diagnose           evolve, then check the body/collar estimates and tips
  compare            evolve, gauge-transform, and difference two solutions
  spectral-selftest  Gaussian moments, drift eigenrelations, orthogonality

Every command writes ``manifest.csv`` (the run parameters) and
``report.csv`` (one row per check: module, operation, inequality,
worst-case location, value, bound, verdict) into the output directory,
and prints one PASS/FAIL line per row.  Exit status: 0 when every row
passes, 1 when any row fails, 2 on configuration errors.  Output files
are byte-identical across reruns with the same manifest and seed.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bryant import (
    arc_length_profile,
    concavity_threshold,
    eval_chi,
    phi_residual,
    save_phi_table,
    solve_phi,
)
from .difference import a_and_Q, build_diff_frame, save_diff_frame, save_diff_series
from .profile_pde import (
    EvolveConfig,
    StepFailure,
    asymptotics_report,
    build_initial_profile,
    concavity_monitor,
    evolve,
    save_snapshot,
    tip_scalar_curvature,
)
from .rescale import AdmissibleTriplet, apply_abg, check_admissible, solve_s_ode, to_cylindrical
from .spectral import (
    DEFAULT_DXI,
    DEFAULT_X,
    GaussFunction,
    apply_drift_L,
    gauss_grid,
    gauss_inner,
    moment_selftest,
)

TAU_STEP = 0.0125  # lattice spacing in the slow time for evolve/diagnose/compare
LEAD_IN = 3  # snapshots ahead of the comparison window (time interpolation stencil)

DEFAULTS: dict[str, object] = {
    "t0_log": 10.0,
    "theta": 0.05,
    "epsilon": 0.01,
    "alpha": 0.0,
    "beta": 0.0,
    "gamma": 0.0,
    "dz": None,  # derived from dxi when not given
    "dxi": DEFAULT_DXI,
    "dt_safety": 0.2,
    "steps": 8,
    "seed": 0,
    "out": "ovalflow-out",
}
_FLOAT_KEYS = {"t0_log", "theta", "epsilon", "alpha", "beta", "gamma", "dz", "dxi", "dt_safety"}
_INT_KEYS = {"steps", "seed"}


class ConfigError(Exception):
    """Invalid configuration: reported on stderr with exit status 2."""


@dataclass
class RunManifest:
    """What produced an output directory: command, config, seed, version."""

    command: str
    config_path: str
    out_dir: str
    seed: int
    version: str

    def save(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["key", "value"])
            w.writerow(["command", self.command])
            w.writerow(["config", self.config_path])
            w.writerow(["out", self.out_dir])
            w.writerow(["seed", str(self.seed)])
            w.writerow(["version", self.version])


# ---------------------------------------------------------------------------
# report rows


def _row(module, operation, inequality, worst, value, bound, passed) -> dict:
    return {
        "module": module,
        "operation": operation,
        "inequality": inequality,
        "worst_location": worst,
        "value": float(value),
        "bound": float(bound),
        "verdict": "PASS" if passed else "FAIL",
    }


def _write_report(rows: list[dict], out_dir: str) -> None:
    with open(os.path.join(out_dir, "report.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["module", "operation", "inequality", "worst_location", "value", "bound", "verdict"])
        for r in rows:
            w.writerow(
                [
                    r["module"],
                    r["operation"],
                    r["inequality"],
                    r["worst_location"],
                    f"{r['value']:.17g}",
                    f"{r['bound']:.17g}",
                    r["verdict"],
                ]
            )


def _emit(rows: list[dict]) -> None:
    for r in rows:
        print(
            f"{r['verdict']} {r['module']}.{r['operation']}: {r['inequality']} "
            f"[value={r['value']:.6g}, bound={r['bound']:.6g}, at {r['worst_location']}]"
        )


# ---------------------------------------------------------------------------
# configuration


def _load_config(path: str) -> dict:
    """Parse a key=value file; unknown keys and bad values are config errors."""
    out: dict[str, object] = {}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for n, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                out[key] = float(val)
            elif key in _INT_KEYS:
                out[key] = int(val)
            else:
                out[key] = val
        except ValueError as exc:
            raise ConfigError(f"{path}:{n}: bad value for {key}: {val!r}") from exc
    return out


def _merge(ns: argparse.Namespace) -> dict:
    """Defaults, then config-file values, then explicit flags."""
    settings = dict(DEFAULTS)
    if ns.config:
        settings.update(_load_config(ns.config))
    for key in DEFAULTS:
        flag = getattr(ns, key, None)
        if flag is not None:
            settings[key] = flag
    if settings["steps"] < 1:
        raise ConfigError(f"steps must be >= 1, got {settings['steps']}")
    return settings


# ---------------------------------------------------------------------------
# shared oval run


def _run_lattice(settings: dict, lead_in: int = 0, trail: int = 0):
    """Evolve the oval data over a slow-time lattice.

    The lattice is tau = -t0_log + TAU_STEP * (k - lead_in) for
    k = 0 .. steps + lead_in + trail; the first ``lead_in`` snapshots
    give the time-interpolation stencil full coverage before the window
    of interest starts, and the ``trail`` snapshots past its end keep
    slightly-later source times (gamma > 0 shifts) inside the series.
    Returns (eval times, matching snapshots, all snapshots, L0), where
    L0 = 2 B_* is the concavity threshold scale read off the steady
    profile.
    """
    ell = float(settings["t0_log"])
    steps = int(settings["steps"])
    dz = settings["dz"]
    if dz is None:
        dz = float(settings["dxi"]) * math.exp(0.5 * ell)
    taus = -ell + TAU_STEP * (np.arange(steps + lead_in + trail + 1) - lead_in)
    ts = -np.exp(-taus)
    cfg = EvolveConfig(
        t0=float(ts[0]),
        dz=float(dz),
        dt_safety=float(settings["dt_safety"]),
        snapshot_times=[float(t) for t in ts[1:-1]],
    )
    tab = solve_phi(50.0, 1e-3)
    curve = arc_length_profile(tab, z_max=max(60.0, 2.0 * ell))
    state0 = build_initial_profile(cfg, curve)
    snaps = evolve(state0, cfg, float(ts[-1]))
    scale = abs(float(ts[0]))
    by_time = {round(s.t / scale, 12): s for s in snaps}
    eval_ts = ts[lead_in : lead_in + steps + 1]
    try:
        eval_snaps = [by_time[round(float(t) / scale, 12)] for t in eval_ts]
    except KeyError as exc:  # pragma: no cover - evolve lands on every target
        raise RuntimeError(f"no snapshot at requested time {exc}") from exc
    return eval_ts, eval_snaps, snaps, 2.0 * concavity_threshold(tab)


def _concavity_row(state, module: str, l0: float) -> dict:
    mon = concavity_monitor(state, l0)
    if mon["vacuous"]:
        return _row(
            module,
            "concavity",
            "inner-body region empty (vacuous)",
            f"t={state.t:.8g}",
            0.0,
            mon["tolerance"],
            True,
        )
    return _row(
        module,
        "concavity",
        "discrete (F^2/2 + t)_zz <= tolerance on the inner body",
        f"z={mon['worst_z']:.6g}, t={state.t:.8g}",
        mon["max_h_zz"],
        mon["tolerance"],
        mon["passed"],
    )


# ---------------------------------------------------------------------------
# commands


def cmd_bryant(settings: dict, out: str) -> list[dict]:
    tab = solve_phi(50.0, 1e-3)
    save_phi_table(tab, os.path.join(out, "phi_table.csv"))
    rows = []

    res = np.abs(phi_residual(tab))
    i = int(np.argmax(res))
    rows.append(
        _row(
            "bryant",
            "ode_residual",
            "max |steady ODE residual| <= 1e-6",
            f"r={tab.r_grid[1 + i]:.6g}",
            res[i],
            1e-6,
            res[i] <= 1e-6,
        )
    )

    near = (tab.r_grid > 0.0) & (tab.r_grid <= 0.5)
    rn = tab.r_grid[near]
    dev = np.abs(np.abs(tab.phi[near] - (1.0 - rn * rn / 6.0)) / rn**4 - 1.0 / 90.0)
    j = int(np.argmax(dev))
    rows.append(
        _row(
            "bryant",
            "near_field",
            "quartic coefficient of Phi - (1 - r^2/6) matches 1/90 within 1e-3 on r <= 1/2",
            f"r={rn[j]:.6g}",
            dev[j],
            1e-3,
            dev[j] <= 1e-3,
        )
    )

    far = tab.r_grid >= 10.0
    rf = tab.r_grid[far]
    y = np.abs(rf * rf * tab.phi[far] - 1.0 - 2.0 / (rf * rf))
    good = y > 1e-300
    slope = float(np.polyfit(np.log(rf[good]), np.log(y[good]), 1)[0])
    rows.append(
        _row(
            "bryant",
            "far_field",
            "|r^2 Phi - 1 - 2 r^-2| decays with fitted exponent >= 3.5",
            f"fit window r in [10, {tab.r_max:g}]",
            -slope,
            3.5,
            -slope >= 3.5,
        )
    )

    chi = eval_chi(tab, tab.r_grid)
    i_min, i_max = int(np.argmin(chi)), int(np.argmax(chi))
    rows.append(
        _row(
            "bryant",
            "chi_lower",
            "chi >= 0.1 on the full range",
            f"r={tab.r_grid[i_min]:.6g}",
            chi[i_min],
            0.1,
            chi[i_min] >= 0.1,
        )
    )
    rows.append(
        _row(
            "bryant",
            "chi_upper",
            "chi <= 1.2 on the full range",
            f"r={tab.r_grid[i_max]:.6g}",
            chi[i_max],
            1.2,
            chi[i_max] <= 1.2,
        )
    )
    axis_err = abs(float(eval_chi(tab, 0.0)) - 1.0 / 6.0)
    rows.append(
        _row("bryant", "chi_axis", "|chi(0+) - 1/6| <= 1e-4", "r=0", axis_err, 1e-4, axis_err <= 1e-4)
    )
    tail = np.abs(chi[far] - 1.0) * rf * rf
    k = int(np.argmax(tail))
    rows.append(
        _row(
            "bryant",
            "chi_tail",
            "|chi - 1| <= 3.5 r^-2 for r >= 10",
            f"r={rf[k]:.6g}",
            tail[k],
            3.5,
            tail[k] <= 3.5,
        )
    )
    return rows


def cmd_evolve(settings: dict, out: str) -> list[dict]:
    eval_ts, eval_snaps, _, l0 = _run_lattice(settings)
    for k, snap in enumerate(eval_snaps):
        save_snapshot(snap, os.path.join(out, f"snapshot_{k:03d}.csv"))
    last = eval_snaps[-1]
    rows = [
        _row(
            "profile_pde",
            "evolve",
            f"reached t_end = {eval_ts[-1]:.8g} with every snapshot valid",
            f"t={last.t:.8g}",
            last.t,
            eval_ts[-1],
            True,
        ),
        _concavity_row(last, "profile_pde", l0),
    ]
    return rows


def cmd_diagnose(settings: dict, out: str) -> list[dict]:
    theta = float(settings["theta"])
    eval_ts, eval_snaps, _, l0 = _run_lattice(settings)
    first, last = eval_snaps[0], eval_snaps[-1]
    save_snapshot(first, os.path.join(out, "snapshot_first.csv"))
    save_snapshot(last, os.path.join(out, "snapshot_last.csv"))

    rows = []
    rep0 = {r["name"]: r for r in asymptotics_report(first, theta)}
    rep1 = asymptotics_report(last, theta)
    for r in rep1:
        base = rep0[r["name"]]
        if r["vacuous"] or base["vacuous"]:
            rows.append(
                _row(
                    "profile_pde",
                    f"asymptotics_{r['name']}",
                    "estimate region empty (vacuous)",
                    f"t={last.t:.8g}",
                    0.0,
                    0.0,
                    True,
                )
            )
            continue
        bound = base["max_residual"] + 0.05
        rows.append(
            _row(
                "profile_pde",
                f"asymptotics_{r['name']}",
                "final normalized residual <= initial + 0.05",
                f"z={r['worst_z']:.6g}, t={last.t:.8g}",
                r["max_residual"],
                bound,
                r["max_residual"] <= bound,
            )
        )

    rows.append(_concavity_row(last, "profile_pde", l0))

    ell = math.log(-last.t)
    for side, r_tip in zip(("left", "right"), tip_scalar_curvature(last)):
        ratio = r_tip * (-last.t) / ell
        rows.append(
            _row(
                "profile_pde",
                f"tip_curvature_{side}",
                "0.7 <= R_tip (-t) / log(-t) <= 1.3",
                f"{side} tip, t={last.t:.8g}",
                ratio,
                1.3,
                0.7 <= ratio <= 1.3,
            )
        )
    return rows


def cmd_compare(settings: dict, out: str) -> list[dict]:
    eval_ts, eval_snaps, snaps, _ = _run_lattice(settings, lead_in=LEAD_IN, trail=1)
    triplet = AdmissibleTriplet(
        float(settings["alpha"]),
        float(settings["beta"]),
        float(settings["gamma"]),
        t_star=float(eval_ts[-1]),
        epsilon=float(settings["epsilon"]),
    )
    if not check_admissible(triplet):
        raise ConfigError(
            f"triplet (alpha={triplet.alpha:g}, beta={triplet.beta:g}, "
            f"gamma={triplet.gamma:g}) is outside the admissible box for "
            f"epsilon={triplet.epsilon:g} at t* = {triplet.t_star:.8g}"
        )
    s_table = solve_s_ode(snaps, triplet)
    states2 = apply_abg(snaps, triplet, s_table, t_out=np.asarray(eval_ts, dtype=float))
    diffs = [
        build_diff_frame(to_cylindrical(s1), to_cylindrical(s2), float(settings["theta"]))
        for s1, s2 in zip(eval_snaps, states2)
    ]
    series = a_and_Q(diffs)
    save_diff_series(series, os.path.join(out, "series.csv"))
    save_diff_frame(diffs[0], os.path.join(out, "diff_first.csv"))
    save_diff_frame(diffs[-1], os.path.join(out, "diff_last.csv"))

    a_abs = np.abs(series.a_series)
    i = int(np.argmax(a_abs))
    identity = settings["alpha"] == 0.0 and settings["beta"] == 0.0 and settings["gamma"] == 0.0
    rows = []
    if identity:
        rows.append(
            _row(
                "difference",
                "a_series",
                "identity transform: max |a| <= 1e-12",
                f"tau={series.taus[i]:.8g}",
                a_abs[i],
                1e-12,
                a_abs[i] <= 1e-12,
            )
        )
    else:
        rows.append(
            _row(
                "difference",
                "a_series",
                "neutral-mode coefficient a finite over the window (reported)",
                f"tau={series.taus[i]:.8g}",
                a_abs[i],
                math.inf,
                bool(np.all(np.isfinite(series.a_series))),
            )
        )
    q_abs = np.abs(series.q_series)
    finite = np.isfinite(q_abs)
    j = int(np.argmax(np.where(finite, q_abs, -1.0)))
    rows.append(
        _row(
            "difference",
            "q_series",
            "modulation-ODE residual Q finite on interior times (reported)",
            f"tau={series.taus[j]:.8g}",
            q_abs[j] if finite.any() else math.nan,
            math.inf,
            bool(np.all(np.isfinite(series.q_series[1:-1]))),
        )
    )
    return rows


def cmd_spectral_selftest(settings: dict, out: str) -> list[dict]:
    dxi = float(settings["dxi"])
    rows = []
    for r in moment_selftest(DEFAULT_X, dxi):
        rows.append(
            _row(
                "spectral",
                f"moment_{r['name']}",
                "Gaussian moment matches its closed form to 1e-8 (relative)",
                f"target={r['target']:.10g}",
                r["rel_err"],
                1e-8,
                r["rel_err"] <= 1e-8,
            )
        )

    xi = gauss_grid(DEFAULT_X, dxi)
    modes = [
        ("constant", np.ones_like(xi), 1.0),
        ("linear", xi.copy(), 0.5),
        ("neutral", xi * xi - 2.0, 0.0),
    ]
    for name, vals, lam in modes:
        f = GaussFunction(xi_grid=xi, values=vals, x_max=DEFAULT_X)
        defect = np.abs(apply_drift_L(f).values - lam * vals)
        i = int(np.argmax(defect))
        rows.append(
            _row(
                "spectral",
                f"eigenrelation_{name}",
                f"max |L f - {lam:g} f| <= 1e-4",
                f"xi={xi[i]:.6g}",
                defect[i],
                1e-4,
                defect[i] <= 1e-4,
            )
        )

    funcs = {
        name: GaussFunction(xi_grid=xi, values=vals, x_max=DEFAULT_X)
        for name, vals, _ in modes
    }
    names = list(funcs)
    for a in range(3):
        for b in range(a + 1, 3):
            val = abs(gauss_inner(funcs[names[a]], funcs[names[b]]))
            rows.append(
                _row(
                    "spectral",
                    f"orthogonality_{names[a]}_{names[b]}",
                    "weighted inner product of distinct modes <= 1e-10",
                    "full grid",
                    val,
                    1e-10,
                    val <= 1e-10,
                )
            )
    return rows


HANDLERS = {
    "bryant": cmd_bryant,
    "evolve": cmd_evolve,
    "diagnose": cmd_diagnose,
    "compare": cmd_compare,
    "spectral-selftest": cmd_spectral_selftest,
}


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--t0-log", dest="t0_log", type=float, help="log(-t0) of the initial time")
    shared.add_argument("--theta", type=float, help="collar cutoff parameter")
    shared.add_argument("--epsilon", type=float, help="admissible-box parameter")
    shared.add_argument("--alpha", type=float, help="gauge translation in z")
    shared.add_argument("--beta", type=float, help="gauge translation in t")
    shared.add_argument("--gamma", type=float, help="gauge log-scaling")
    shared.add_argument("--dz", type=float, help="grid spacing (default: dxi * exp(t0_log/2))")
    shared.add_argument("--dxi", type=float, help="cylindrical-variable grid spacing")
    shared.add_argument("--dt-safety", dest="dt_safety", type=float, help="time step as a fraction of dz^2")
    shared.add_argument("--steps", type=int, help="number of slow-time lattice intervals")
    shared.add_argument("--out", help="output directory")
    shared.add_argument("--seed", type=int, help="seed recorded in the manifest")
    shared.add_argument("--config", help="key=value config file (flags override)")

    parser = argparse.ArgumentParser(
        prog="ovalflow",
        description="Numerical checks for ancient oval-type mean-profile flows.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("bryant", parents=[shared], help="steady-profile table and invariants")
    sub.add_parser("evolve", parents=[shared], help="run the oval data, save snapshots")
    sub.add_parser("diagnose", parents=[shared], help="evolve plus body/collar/tip checks")
    sub.add_parser("compare", parents=[shared], help="difference a run against its gauge transform")
    sub.add_parser("spectral-selftest", parents=[shared], help="moments, eigenrelations, orthogonality")
    return parser


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    try:
        settings = _merge(ns)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = str(settings["out"])
    os.makedirs(out, exist_ok=True)
    RunManifest(
        command=ns.command,
        config_path=ns.config or "",
        out_dir=out,
        seed=int(settings["seed"]),
        version=__version__,
    ).save(os.path.join(out, "manifest.csv"))

    try:
        rows = HANDLERS[ns.command](settings, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StepFailure as exc:
        rows = [
            _row(
                "profile_pde",
                "step",
                "time step preserved the state invariants",
                f"t={exc.diagnostic_state.t:.8g}" if exc.diagnostic_state else "unknown",
                math.nan,
                math.nan,
                False,
            )
        ]
        _write_report(rows, out)
        _emit(rows)
        print(f"step failure: {exc}", file=sys.stderr)
        return 1

    _write_report(rows, out)
    _emit(rows)
    return 0 if all(r["verdict"] == "PASS" for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
