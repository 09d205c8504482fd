"""Batch front end: linear/nonlinear solves, sweeps, verification."""

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from .config import RunConfig, load_config, ConfigError


def _write_csv(path, rows, fieldnames=None):
    if not rows:
        return
    fieldnames = fieldnames or list(rows[0].keys())
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames,
                                extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})


def _fmt(v):
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    if isinstance(v, float):
        return f"{v:.17g}"
    return v


def _mode_rows(state, grid):
    rows = []
    for n in sorted(state.modes):
        sol = state.modes[n]
        for j, y in enumerate(grid.nodes):
            rows.append({
                "n": n, "Y": y,
                "rho_re": sol.rho[j].real, "rho_im": sol.rho[j].imag,
                "u_re": sol.u[j].real, "u_im": sol.u[j].imag,
                "v_re": sol.v[j].real, "v_im": sol.v[j].imag,
            })
    z = state.zero
    for j, y in enumerate(grid.nodes):
        rows.append({"n": 0, "Y": y,
                     "rho_re": z.rho[j].real, "rho_im": z.rho[j].imag,
                     "u_re": z.u[j].real, "u_im": z.u[j].imag,
                     "v_re": z.v[j].real, "v_im": z.v[j].imag})
    return rows


def cmd_solve_linear(cfg, out_dir):
    from .linear_solver import solve_linear_ns

    grid = cfg.build_grid()
    profile = cfg.build_profile()
    force = cfg.build_force(grid)
    zero = np.zeros(grid.n, dtype=complex)
    data = {}
    for n, (f1, f2) in force.modes.items():
        data[n] = (zero, f1, f2)
    t0 = time.time()
    state = solve_linear_ns(data, cfg.nu, cfg.lam, cfg.torus_len, profile,
                            grid, thresholds=cfg.thresholds,
                            tol_iter=cfg.tol_iter)
    elapsed = time.time() - t0

    _write_csv(os.path.join(out_dir, "modes.csv"), _mode_rows(state, grid))
    norm_rows = [{"name": k, "value": v} for k, v in
                 sorted(state.norms.items())]
    _write_csv(os.path.join(out_dir, "norms.csv"), norm_rows)

    checks = []
    for n, sol in sorted(state.modes.items()):
        checks.append({
            "check": f"mode_{n}_residual", "value": sol.residual,
            "tol": cfg.tol_res, "pass": sol.residual <= cfg.tol_res})
        checks.append({
            "check": f"mode_{n}_noslip",
            "value": max(sol.diagnostics["wall_u"],
                         sol.diagnostics["wall_v"]),
            "tol": cfg.tol_bc,
            "pass": max(sol.diagnostics["wall_u"],
                        sol.diagnostics["wall_v"]) <= cfg.tol_bc})
    checks.append({"check": "zero_mode_residual",
                   "value": state.zero.residual, "tol": cfg.tol_res,
                   "pass": state.zero.residual <= cfg.tol_res})
    checks.append({"check": "hermitian_defect",
                   "value": state.hermitian_defect(), "tol": 1e-12,
                   "pass": state.hermitian_defect() <= 1e-12})
    checks.append({"check": "walltime_s", "value": elapsed, "tol": "",
                   "pass": True})
    _write_csv(os.path.join(out_dir, "verification.csv"), checks)
    ok = all(c["pass"] for c in checks)
    print(f"solve-linear: {len(state.modes)} modes, "
          f"{'PASS' if ok else 'FAIL'} ({elapsed:.1f}s)")
    return 0 if ok else 1


def cmd_solve_nonlinear(cfg, out_dir):
    from .nonlinear import picard_solve

    grid = cfg.build_grid()
    profile = cfg.build_profile()
    force = cfg.build_force(grid)
    t0 = time.time()
    hist = []
    ps = picard_solve(force, cfg.nu, cfg.lam, cfg.torus_len, profile, grid,
                      cfg.n_max, gamma=cfg.gamma, tol=cfg.tol_nl * 1e-2,
                      thresholds=cfg.thresholds, mode_tol=cfg.tol_iter,
                      collect=hist)
    elapsed = time.time() - t0
    _write_csv(os.path.join(out_dir, "picard.csv"), hist)
    _write_csv(os.path.join(out_dir, "modes.csv"),
               _mode_rows(ps.state, grid))
    report = {
        "converged": ps.converged,
        "iterations": ps.iterations,
        "residual": ps.residual,
        "mass": ps.diagnostics["mass"],
        "div_trace": ps.diagnostics["div_trace"],
        "norm_2": ps.state.norms["norm_2"],
        "force_norm_w": force.norm_w(cfg.nu, cfg.s, grid),
        "walltime_s": elapsed,
    }
    with open(os.path.join(out_dir, "nonlinear.json"), "w") as fh:
        json.dump(report, fh, indent=2)
    ok = ps.converged and ps.residual <= cfg.tol_nl
    print(f"solve-nonlinear: {'PASS' if ok else 'FAIL'} "
          f"iters={ps.iterations} residual={ps.residual:.2e} "
          f"({elapsed:.1f}s)")
    return 0 if ok else 1


def cmd_sweep(cfg, out_dir):
    from .sweeps import run_sweep

    rows, fits = run_sweep(cfg)
    _write_csv(os.path.join(out_dir, "sweep.csv"), rows)
    fit_rows = []
    ok = True
    for name, fit in fits.items():
        if fit is None:
            continue
        fit_rows.append({
            "name": name, "slope": fit.slope, "band95": fit.band95,
            "exponent": fit.exponent, "slack": fit.slack,
            "direction": fit.direction, "npoints": fit.npoints,
            "pass": fit.passed})
        ok = ok and bool(fit.passed)
        print(f"sweep {name}: slope={fit.slope:.3f} "
              f"(envelope {fit.exponent:+.3f}, slack {fit.slack}) "
              f"{'PASS' if fit.passed else 'FAIL'}")
    _write_csv(os.path.join(out_dir, "fits.csv"), fit_rows)
    return 0 if ok else 1


def cmd_modes(cfg):
    from .linear_solver import classify_regime

    print(f"nu={cfg.nu} L={cfg.torus_len} n_max={cfg.n_max}")
    print(f"{'n':>5} {'n_hat':>12} {'alpha':>12} {'eps':>12} "
          f"{'a*e^(1/3)':>12} regime")
    for n in range(1, cfg.n_max + 1):
        n_hat = n / cfg.torus_len
        alpha = n_hat * np.sqrt(cfg.nu)
        eps = 1.0 / n_hat
        t = alpha * eps ** (1.0 / 3.0)
        regime = classify_regime(alpha, eps, cfg.thresholds)
        print(f"{n:>5} {n_hat:>12.4g} {alpha:>12.4g} {eps:>12.4g} "
              f"{t:>12.4g} {regime}")
    return 0


def cmd_verify(cfg, out_dir):
    from .verify import run_verification

    report = run_verification(cfg)
    _write_csv(os.path.join(out_dir, "verify.csv"), report)
    n_fail = sum(1 for r in report if not r["pass"])
    for r in report:
        status = "PASS" if r["pass"] else "FAIL"
        print(f"[{status}] {r['check']}: value={r['value']:.3e} "
              f"tol={r['tol']:.3e}")
    print(f"verify: {len(report) - n_fail}/{len(report)} checks passed")
    return 0 if n_fail == 0 else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="shearstab",
        description="Mode-by-mode solvers for subsonic boundary-layer "
                    "shear-flow stability")
    parser.add_argument("--config", help="path to key=value config file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve-linear", "solve-nonlinear", "sweep", "verify",
                 "modes"):
        sub.add_parser(name)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config) if args.config else \
            RunConfig().validate()
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
    if args.jobs is not None:
        cfg.jobs = args.jobs
    out_dir = args.out or cfg.out_dir

    try:
        if args.command == "solve-linear":
            return cmd_solve_linear(cfg, out_dir)
        if args.command == "solve-nonlinear":
            return cmd_solve_nonlinear(cfg, out_dir)
        if args.command == "sweep":
            return cmd_sweep(cfg, out_dir)
        if args.command == "verify":
            return cmd_verify(cfg, out_dir)
        if args.command == "modes":
            return cmd_modes(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
