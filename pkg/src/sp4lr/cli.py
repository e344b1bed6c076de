"""Scenario-driven command line front end.

``sp4lr run --config scenario.json [--out dir]`` loads a JSON scenario,
runs one of the five pipeline modes, writes CSV trajectories plus a JSON
report, and exits 0 when every check passes, 2 on a check failure and 1
on a configuration or domain error.  ``sp4lr run --describe`` prints the
configuration schema with defaults.  The environment variable
``SP4_SEED`` fixes the seed used for randomized sample points.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import crosschecks
from .algebra import (
    AlgebraElement,
    adjoint,
    commutator,
    generator_matrices,
    parity_action,
    pt_map,
    structure_constants,
    OMEGA,
)
from .errors import ConfigInvalid, Sp4lrError
from .hamiltonian import (
    CoupledOscillatorParams,
    build_H_coeffs,
    classify_regime,
    instantaneous_eigenvalues,
)
from .lr_ode import (
    ClosedFormParams,
    assemble_invariant,
    closed_form_on_grid,
    evolve,
    invariant_matrix,
    involution_residuals,
    lr_residual,
)
from .numerics import frobenius
from .point_transform import (
    PointTransformParams,
    dyson_static,
    ep_residual,
    ep_state,
    hermitian_invariant_expansion,
    hermitian_invariant_Ih,
    invariant_IH,
    metric_is_positive,
    pde_constraint_residuals,
    pushforward,
    target_coefficients,
    tdde_residual,
)
from .profiles import ScalarProfile

__all__ = ["main", "run_scenario", "emit_plot_data", "describe_schema"]

_MODES = ("algebra-check", "lr-closed-form", "lr-ode", "point-transform", "regime-map")

_SCHEMA = {
    "mode": "one of %s" % (list(_MODES),),
    "grid": {"t0": 0.0, "t1": 5.0, "steps": 5001},
    "hbar": 1.0,
    "seed": "int, optional; overridden by env SP4_SEED",
    "params": {
        "algebra-check": {"samples": 100},
        "lr-closed-form": {"alpha": 3.0, "lam": {"kind": "constant", "value": 1.0}},
        "lr-ode": {
            "a": {"kind": "constant", "value": 1.0},
            "omega_x": {"kind": "constant", "value": 1.0},
            "omega_y": {"kind": "constant", "value": 1.0},
            "lam": {"kind": "constant", "value": 1.0},
            "solver": "time_ordered | commuting",
            "c0": "optional list of 10 [re, im] pairs",
        },
        "point-transform": {
            "alpha": 2.0, "beta": 1.0, "coupling": 0.5, "c2": 0.2, "c3": 0.2,
            "c1_phase": 0.0, "r": {"kind": "constant", "value": 1.0},
        },
        "regime-map": {
            "a": {"kind": "constant", "value": 1.0},
            "omega_x": {"kind": "constant", "value": 1.0},
            "omega_y": {"kind": "constant", "value": 1.0},
            "lam": {"kind": "sinusoid", "amp": 1.0, "freq": 1.0, "phase": 0.0, "offset": 0.5},
        },
    },
    "profiles": {
        "constant": {"kind": "constant", "value": 1.0},
        "sinusoid": {"kind": "sinusoid", "amp": 1.0, "freq": 1.0, "phase": 0.0, "offset": 0.0},
        "polynomial": {"kind": "polynomial", "coeffs": [0.0, 1.0]},
        "tabulated": {"kind": "tabulated", "times": [0.0, 1.0], "values": [1.0, 1.0]},
    },
}


def describe_schema() -> str:
    return json.dumps(_SCHEMA, indent=2, sort_keys=True)


def emit_plot_data(trajectory, path):
    """Write named columns to CSV with 17-significant-digit floats.

    ``trajectory`` is a (names, columns) pair or a dict name -> 1-d
    array; the first column is time and must be strictly increasing.
    Raises on an empty trajectory before creating the file.
    """
    if isinstance(trajectory, dict):
        names, cols = list(trajectory.keys()), list(trajectory.values())
    else:
        names, cols = trajectory
    if not names or any(len(np.atleast_1d(c)) == 0 for c in cols):
        raise ValueError("empty trajectory; nothing to write")
    cols = [np.atleast_1d(c) for c in cols]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("trajectory columns must share a length")
    tcol = np.asarray(cols[0], dtype=float)
    if np.any(np.diff(tcol) <= 0):
        raise ValueError("time column must be strictly increasing")
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for k in range(n):
            cells = []
            for c in cols:
                v = c[k]
                cells.append(v if isinstance(v, str) else "%.17g" % float(v))
            fh.write(",".join(cells) + "\n")
    return path


def _complex_columns(prefix_names, stack):
    names, cols = [], []
    for j, base in enumerate(prefix_names):
        names += ["re_%s" % base, "im_%s" % base]
        cols += [stack[:, j].real.copy(), stack[:, j].imag.copy()]
    return names, cols


class _Checks:
    def __init__(self):
        self.rows = []

    def add(self, name, residual, tolerance):
        self.rows.append({
            "name": name,
            "residual": float(residual),
            "tolerance": float(tolerance),
            "status": "pass" if float(residual) <= float(tolerance) else "fail",
        })

    @property
    def all_pass(self):
        return all(r["status"] == "pass" for r in self.rows)


def _require(cond, msg):
    if not cond:
        raise ConfigInvalid(msg)


def _load_grid(cfg):
    g = cfg.get("grid", {})
    t0 = float(g.get("t0", 0.0))
    t1 = float(g.get("t1", 5.0))
    steps = int(g.get("steps", 5001))
    _require(steps >= 5, "grid.steps: need at least 5 points")
    _require(t1 > t0, "grid.t1 must exceed grid.t0")
    return np.linspace(t0, t1, steps)


def _profile(cfg, field):
    try:
        return ScalarProfile.from_config(cfg[field])
    except KeyError:
        raise ConfigInvalid("params.%s: missing profile" % field)
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid("params.%s: %s" % (field, exc))


def _seed(cfg):
    env = os.environ.get("SP4_SEED")
    if env is not None:
        return int(env)
    return int(cfg.get("seed", 20240801))


# ---------------------------------------------------------------------------
# modes


def _run_algebra_check(cfg, grid, outdir, checks, artifacts):
    rng = np.random.default_rng(_seed(cfg))
    gen = generator_matrices()
    f = structure_constants()
    # commutator table against the matrix representation
    worst = 0.0
    for i in range(10):
        for j in range(i + 1, 10):
            lhs = gen[i] @ gen[j] - gen[j] @ gen[i]
            rhs = np.tensordot(f[i, j], gen, axes=(0, 0))
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    checks.add("commutator_table", worst, 1e-12)
    # symplectic condition, exact
    sympl = max(float(np.abs(OMEGA @ gen[i] + gen[i].T @ OMEGA).max()) for i in range(10))
    checks.add("symplectic_condition", sympl, 0.0)
    # Jacobi identity over all triples, in coefficient form
    fj = np.einsum("ijm,mkl->ijkl", f, f)
    jac = float(np.abs(fj + np.einsum("jkm,mil->ijkl", f, f)
                       + np.einsum("kim,mjl->ijkl", f, f)).max())
    checks.add("jacobi_identity", jac, 1e-12)
    # antilinear maps square to the identity
    sq = 0.0
    for g in range(10):
        e = AlgebraElement.unit(g) * (1 + 0.3j)
        for variant in ("PT", "PT_tilde"):
            sq = max(sq, float(np.abs(pt_map(pt_map(e, variant), variant).coeffs - e.coeffs).max()))
    checks.add("pt_involution", sq, 1e-15)
    # parity vs adjoint on random Hamiltonians
    from .hamiltonian import build_H

    worst = 0.0
    for _ in range(int(cfg.get("params", {}).get("samples", 100))):
        a, wx, wy, lam = rng.uniform(0.2, 3.0, size=4)
        p = CoupledOscillatorParams(*(ScalarProfile.constant(v) for v in (a, wx, wy, lam)))
        h = build_H(p, 0.0)
        worst = max(worst, float(np.abs(parity_action(h).coeffs - adjoint(h).coeffs).max()))
    checks.add("parity_equals_adjoint", worst, 1e-12)
    return {}


def _run_lr_closed_form(cfg, grid, outdir, checks, artifacts):
    p = cfg.get("params", {})
    alpha = float(p.get("alpha", 3.0))
    lam = _profile(p, "lam")
    cf = ClosedFormParams(alpha=alpha, lam=lam)
    traj = closed_form_on_grid(cf, grid)
    osc = cf.oscillator_params()
    rng = np.random.default_rng(_seed(cfg))

    checks.add("initial_condition",
               float(np.abs(traj[0] - np.array([0, 0, 1, 1, 0, 0, 0, 0, 0, 0])).max()), 0.0)
    # 100 random grid times.  The first constraint is a square root of a
    # cancelling expression; within ~3e-3 of a c1 zero (the seed time and,
    # for some alpha, isolated interior points) double precision cannot
    # resolve it below 1e-10, so those samples are certified through the
    # well-conditioned I^2 = 1 / det = 1 checks below instead.
    idx = rng.choice(grid.size, size=min(100, grid.size), replace=False)
    idx = idx[np.abs(traj[idx, 0]) > 3e-3]
    if idx.size == 0:
        idx = np.array([np.argmax(np.abs(traj[:, 0]))])
    r1, r2, r7, r10 = involution_residuals(traj[idx])
    checks.add("involution_constraints",
               float(max(np.abs(r).max() for r in (r1, r2, r7, r10))), 1e-10)
    mats = invariant_matrix(traj)
    checks.add("invariant_squares_to_identity",
               float(frobenius(mats @ mats - np.eye(4)).max()), 1e-10)
    checks.add("unit_determinant",
               float(np.abs(np.linalg.det(mats) - 1.0).max()), 1e-10)
    inv = assemble_invariant(traj)
    hc = build_H_coeffs(osc, grid)
    checks.add("lr_residual", lr_residual(inv, hc, grid, hbar=float(cfg.get("hbar", 1.0))), 1e-8)

    from .lr_ode import _commutativity_probe  # sampled guard shared with evolve
    checks.add("commutativity_probe", _commutativity_probe(osc, grid), 1e-12)
    c0 = traj[0]
    checks.add("cross_solver_time_ordered",
               float(np.abs(evolve(c0, grid, osc, mode="time_ordered") - traj).max()), 1e-6)
    checks.add("cross_solver_commuting",
               float(np.abs(evolve(c0, grid, osc, mode="commuting") - traj).max()), 1e-8)

    names = ["t"]
    cnames, cols = _complex_columns(["c%d" % (k + 1) for k in range(10)], traj)
    names += cnames
    path = os.path.join(outdir, "closed_form_trajectory.csv")
    emit_plot_data((names, [grid] + cols), path)
    artifacts.append(path)
    sq, det, defect = _residual_trail(cfg, grid, traj, osc)
    path2 = os.path.join(outdir, "closed_form_residuals.csv")
    emit_plot_data((names + ["inv_sq_err", "det_err", "lr_residual"],
                    [grid] + cols + [sq, det, defect]), path2)
    artifacts.append(path2)
    return {"alpha": alpha}


def _residual_trail(cfg, grid, traj, params):
    """Per-sample defect columns: involution error, determinant error and
    the pointwise invariant-equation defect."""
    from .numerics import central_diff

    inv = assemble_invariant(traj)
    hc = build_H_coeffs(params, grid)
    mats = invariant_matrix(traj)
    sq = frobenius(mats @ mats - np.eye(4))
    det = np.abs(np.linalg.det(mats) - 1.0)
    didt = central_diff(inv, grid[1] - grid[0])
    defect = np.abs(1j * float(cfg.get("hbar", 1.0)) * didt - commutator(hc, inv)).max(axis=1)
    return sq, det, defect


def _run_lr_ode(cfg, grid, outdir, checks, artifacts):
    p = cfg.get("params", {})
    params = CoupledOscillatorParams(
        a=_profile(p, "a"), omega_x=_profile(p, "omega_x"),
        omega_y=_profile(p, "omega_y"), lam=_profile(p, "lam"))
    solver = p.get("solver", "time_ordered")
    _require(solver in ("time_ordered", "commuting"), "params.solver invalid")
    if "c0" in p:
        c0 = AlgebraElement.from_pairs(p["c0"]).coeffs
    else:
        c0 = np.zeros(10, dtype=complex)
        c0[2] = c0[3] = 1.0
    traj = evolve(c0, grid, params, mode=solver)
    inv = assemble_invariant(traj)
    hc = build_H_coeffs(params, grid)
    checks.add("lr_residual",
               lr_residual(inv, hc, grid, hbar=float(cfg.get("hbar", 1.0))),
               float(p.get("lr_tol", 1e-6)))
    names = ["t"]
    cnames, cols = _complex_columns(["c%d" % (k + 1) for k in range(10)], traj)
    path = os.path.join(outdir, "ode_trajectory.csv")
    emit_plot_data((names + cnames, [grid] + cols), path)
    artifacts.append(path)
    sq, det, defect = _residual_trail(cfg, grid, traj, params)
    path2 = os.path.join(outdir, "ode_residuals.csv")
    emit_plot_data((names + cnames + ["inv_sq_err", "det_err", "lr_residual"],
                    [grid] + cols + [sq, det, defect]), path2)
    artifacts.append(path2)
    return {"solver": solver}


def _run_point_transform(cfg, grid, outdir, checks, artifacts):
    p = cfg.get("params", {})
    try:
        params = PointTransformParams(
            alpha=float(p["alpha"]), beta=float(p["beta"]),
            coupling=float(p.get("coupling", p.get("Lambda", 0.0))),
            r=_profile(p, "r"), c2=float(p.get("c2", 0.0)), c3=float(p.get("c3", 0.0)),
            c1_phase=float(p.get("c1_phase", 0.0)))
    except KeyError as exc:
        raise ConfigInvalid("params.%s missing" % exc.args[0])
    hbar = float(cfg.get("hbar", 1.0))
    rng = np.random.default_rng(_seed(cfg))

    ep = ep_state(params, grid)
    checks.add("ermakov_pinney_residual", float(np.abs(ep_residual(params, ep)).max()), 1e-8)

    stat = dyson_static(params)
    if params.coupling != 0.0:
        s = np.lib.scimath.sqrt(stat.params.kappa1 * stat.params.kappa2)
        lhs = 2.0 * params.coupling * np.cos(2.0 * s)
        k1, k2 = stat.params.kappa1, stat.params.kappa2
        sin_ratio = np.sin(2.0 * s) / s if abs(s) > 0 else 2.0
        res1 = abs(lhs - (params.alpha + params.beta) * (k1 + k2) * sin_ratio)
        res2 = abs(lhs - (params.alpha - params.beta) * (k1 - k2) * sin_ratio)
        checks.add("static_map_constraints", max(res1, res2), 1e-10)
        checks.add("static_map_postcondition", stat.check_residual, 1e-10)

    inv = invariant_IH(params, grid)
    a, b, lam = target_coefficients(params, grid, ep)
    from .hamiltonian import build_H_modified
    # differentiate on a half-step grid so the stencil truncation stays
    # well below the tolerance under test
    fine = np.linspace(grid[0], grid[-1], 2 * (grid.size - 1) + 1)
    af, bf, lf = target_coefficients(params, fine)
    checks.add("invariant_lr_residual",
               lr_residual(invariant_IH(params, fine), build_H_modified(af, bf, lf),
                           fine, hbar=hbar), 1e-8)

    ih = hermitian_invariant_Ih(params, grid, stat)
    if not stat.complex_delta:
        checks.add("hermiticity_leak", float(np.abs(ih.imag).max()), 1e-8)
    ih_image = pushforward(params, grid, stat.h0)
    checks.add("invariant_image_match", float(np.abs(ih - ih_image).max()), 1e-8)
    ih_expansion = hermitian_invariant_expansion(params, grid, stat)
    checks.add("hermitian_expansion_match", float(np.abs(ih - ih_expansion).max()), 1e-8)

    checks.add("tdde_residual", tdde_residual(params, grid, hbar=hbar, static=stat), 1e-6)

    samples = rng.uniform(-2.0, 2.0, size=(20, 2))
    ts = rng.choice(grid, size=min(20, grid.size), replace=False)
    b0x, b0y, v0 = pde_constraint_residuals(params, ts, samples, hbar=hbar)
    checks.add("pde_b0x", b0x, 1e-8)
    checks.add("pde_b0y", b0y, 1e-8)
    checks.add("pde_potential_match", v0, 1e-8)

    pos = metric_is_positive(params, grid, stat)
    checks.add("metric_positive_fraction", float(1.0 - pos.mean()), 0.0)

    # per-sample trajectory CSV
    names = ["t", "sigma", "sigma_t", "mu", "mu_t", "tau", "a", "b", "lam"]
    cols = [grid, ep.sigma, ep.sigma_t, ep.mu, ep.mu_t, ep.tau, a, b, lam]
    inames, icols = _complex_columns(["I%d" % k for k in range(10)], inv)
    hnames, hcols = _complex_columns(["Ih%d" % k for k in range(10)], ih)
    path = os.path.join(outdir, "point_transform_trajectory.csv")
    emit_plot_data((names + inames + hnames, cols + icols + hcols), path)
    artifacts.append(path)

    records = crosschecks.point_transform_records(params, grid)
    return {
        "dyson": {"kappa1": stat.params.kappa1, "kappa2": stat.params.kappa2,
                  "delta": [stat.delta.real, stat.delta.imag],
                  "complex_delta": stat.complex_delta},
        "known_discrepancies": [r.to_dict() for r in records],
    }


def _run_regime_map(cfg, grid, outdir, checks, artifacts):
    p = cfg.get("params", {})
    params = CoupledOscillatorParams(
        a=_profile(p, "a"), omega_x=_profile(p, "omega_x"),
        omega_y=_profile(p, "omega_y"), lam=_profile(p, "lam"))
    evs = np.empty((grid.size, 4), dtype=complex)
    regimes = []
    pairing = 0.0
    for k, t in enumerate(grid):
        vals = instantaneous_eigenvalues(params, t, method="numeric")
        evs[k] = vals
        # spectrum symmetric about zero: eigenvalues come in +- pairs
        pairing = max(pairing, float(np.abs(np.sort_complex(vals) + np.sort_complex(-vals)[::-1]).max()))
        regimes.append(classify_regime(params, t).value)
    checks.add("eigenvalue_pairing", pairing, 1e-10)
    names = ["t"] + ["re%d" % (k + 1) for k in range(4)] + ["im%d" % (k + 1) for k in range(4)] + ["regime"]
    cols = [grid] + [evs[:, k].real for k in range(4)] + [evs[:, k].imag for k in range(4)] + [regimes]
    path = os.path.join(outdir, "eigenvalue_trajectory.csv")
    emit_plot_data((names, cols), path)
    artifacts.append(path)
    return {}


_RUNNERS = {
    "algebra-check": _run_algebra_check,
    "lr-closed-form": _run_lr_closed_form,
    "lr-ode": _run_lr_ode,
    "point-transform": _run_point_transform,
    "regime-map": _run_regime_map,
}


def run_scenario(cfg: dict, outdir: str) -> dict:
    """Execute one scenario; returns the report dict (also written to disk)."""
    mode = cfg.get("mode")
    _require(mode in _MODES, "mode: expected one of %s, got %r" % (list(_MODES), mode))
    if "tolerances" in cfg:
        from .numerics import Tolerances

        try:
            Tolerances(**cfg["tolerances"])
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid("tolerances: %s" % exc)
    grid = _load_grid(cfg)
    os.makedirs(outdir, exist_ok=True)
    checks = _Checks()
    artifacts: list[str] = []
    start = time.perf_counter()
    extra = _RUNNERS[mode](cfg, grid, outdir, checks, artifacts)
    wall = time.perf_counter() - start
    report = {
        "scenario": cfg,
        "checks": checks.rows,
        "all_pass": checks.all_pass,
        "artifacts": [os.path.basename(a) for a in artifacts],
        "wall_time_s": wall,
    }
    report.update(extra or {})
    path = os.path.join(outdir, "report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sp4lr", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    runp = sub.add_parser("run", help="run a scenario config")
    runp.add_argument("--config", help="path to the scenario JSON")
    runp.add_argument("--out", default=".", help="output directory (default: cwd)")
    runp.add_argument("--describe", action="store_true",
                      help="print the config schema with defaults and exit")
    args = parser.parse_args(argv)
    if args.command != "run":
        parser.print_help()
        return 1
    if args.describe:
        print(describe_schema())
        return 0
    if not args.config:
        print("error: --config is required (or use --describe)", file=sys.stderr)
        return 1
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print("error: cannot load config: %s" % exc, file=sys.stderr)
        return 1
    try:
        report = run_scenario(cfg, args.out)
    except (ConfigInvalid, Sp4lrError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    for row in report["checks"]:
        print("%-34s %-4s residual=%.3e tolerance=%.3e"
              % (row["name"], row["status"], row["residual"], row["tolerance"]))
    if not report["all_pass"]:
        print("FAIL: %d check(s) failed" % sum(r["status"] != "pass" for r in report["checks"]))
        return 2
    print("PASS: all %d checks" % len(report["checks"]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
