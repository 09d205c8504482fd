"""Machine-readable invariant battery used by the verify subcommand.

A compact version of the acceptance suite: spot residuals for every
solver, conservation/structure identities, boundary-trace constants, and
grid-refinement convergence of wall traces.
"""

import numpy as np

from .data import random_decaying_field
from .operators import ModeOperators


def run_verification(cfg):
    from .profiles import check_structural_conditions
    from .rayleigh import solve_rayleigh_inhomogeneous
    from .airy_solvers import solve_tilde_airy, solve_classical_airy_neumann
    from .orr_sommerfeld import solve_os_symmetrized, solve_os_high_freq, \
        fast_mode
    from .quasi_compressible import solve_qc_inhomogeneous
    from .stokes import solve_stokes
    from .linear_solver import solve_zero_mode, solve_mode, \
        dense_noslip_mode, solve_linear_ns

    grid = cfg.build_grid()
    profile = cfg.build_profile()
    rng = np.random.default_rng(cfg.seed)
    rows = []

    def check(name, value, tol):
        rows.append({"check": name, "value": float(value),
                     "tol": float(tol), "pass": bool(value <= tol)})

    rep = check_structural_conditions(profile, grid)
    check("profile_structural_violations", len(rep.violations), 0)

    eps, alpha = 1e-3, 1.0
    ops = ModeOperators(grid, profile, alpha, eps)
    h = random_decaying_field(rng, grid)
    check("rayleigh_residual",
          solve_rayleigh_inhomogeneous(h, alpha, profile, grid,
                                       ops).residual, cfg.tol_res)
    check("tilde_airy_residual",
          solve_tilde_airy(h, eps, alpha, profile, grid, ops).residual,
          cfg.tol_res)
    check("classical_airy_residual",
          solve_classical_airy_neumann(h, eps, alpha, profile, grid,
                                       ops).residual, cfg.tol_res)
    check("os_iteration_residual",
          solve_os_symmetrized(h, eps, alpha, profile, grid,
                               ops=ops).residual, cfg.tol_res)
    f_any = random_decaying_field(rng, grid, wall_zero=False)
    check("os_high_residual",
          solve_os_high_freq(f_any, 1e-4, 3.0 / 1e-4 ** (1 / 3), profile,
                             grid).residual, cfg.tol_res)
    qc = solve_qc_inhomogeneous(h, f_any, eps, alpha, profile, grid,
                                ops=ops)
    check("qc_residual", qc.residual, cfg.tol_res)
    check("qc_wall_v", abs(qc.v[0]), cfg.tol_bc)
    st = solve_stokes(f_any, h, f_any, eps, alpha, cfg.lam, profile, grid,
                      ops=ops)
    check("stokes_residual", st.residual, cfg.tol_res)
    check("stokes_slip", st.diagnostics["slip_defect"], cfg.tol_bc)

    # zero mode and mass propagation
    y = grid.nodes
    g_massfree = (1.0 - y) * np.exp(-y)
    z = solve_zero_mode(g_massfree, np.zeros(grid.n), np.zeros(grid.n),
                        cfg.nu, cfg.lam, profile, grid)
    check("zero_mode_residual", z.residual, cfg.tol_res)
    check("zero_mode_mass", abs(z.mass), cfg.tol_mass)

    # no-slip mode against the dense oracle
    n_mode = max(1, cfg.n_max // 2)
    gu = random_decaying_field(rng, grid, wall_zero=False)
    gv = random_decaying_field(rng, grid, wall_zero=False)
    gz = np.zeros(grid.n, dtype=complex)
    ms = solve_mode(n_mode, gz, gu, gv, cfg.nu, cfg.lam, cfg.torus_len,
                    profile, grid, thresholds=cfg.thresholds,
                    tol_iter=cfg.tol_iter)
    de = dense_noslip_mode(n_mode, gz, gu, gv, cfg.nu, cfg.lam,
                           cfg.torus_len, profile, grid)
    rel = (np.linalg.norm(ms.stack() - de.stack())
           / np.linalg.norm(de.stack()))
    check("mode_oracle_agreement", rel, cfg.tol_res)
    check("mode_residual", ms.residual, cfg.tol_res)
    check("mode_noslip_traces",
          max(ms.diagnostics["wall_u"], ms.diagnostics["wall_v"]),
          cfg.tol_bc)

    # fast-mode trace constant (high regime is exact for the leading term)
    eps_h = 1e-4
    alpha_h = 3.0 / eps_h ** (1 / 3)
    fm = fast_mode(eps_h, alpha_h, "high", profile, grid,
                   thresholds=cfg.thresholds)
    check("fast_high_trace_floor",
          1.0 / (4.0 * alpha_h) / abs(fm.wall_slope), 1.0)

    # hermitian symmetry of a real-data linear solve
    state = solve_linear_ns({1: (gz, gu, gv),
                             -1: (gz, np.conj(gu), np.conj(gv))},
                            cfg.nu, cfg.lam, cfg.torus_len, profile, grid,
                            thresholds=cfg.thresholds)
    check("hermitian_defect", state.hermitian_defect(), 1e-12)

    # grid-refinement stability of a wall trace (Richardson-style)
    from .grid import build_grid
    grid2 = build_grid(int(cfg.grid_n * 1.5), cfg.y_max, cfg.mapping,
                       cfg.stretch)
    h2 = np.interp(grid2.nodes, grid.nodes, np.real(h)) \
        + 1j * np.interp(grid2.nodes, grid.nodes, np.imag(h))
    s1 = solve_os_symmetrized(h, eps, alpha, profile, grid)
    s2 = solve_os_symmetrized(h2, eps, alpha, profile, grid2)
    drift = abs(s1.wall_slope - s2.wall_slope) / abs(s2.wall_slope)
    check("trace_refinement_drift", drift, 0.2)
    return rows
