"""Parameter sweeps and scaling-exponent regression.

Each tracked bound is an envelope norm <= C * param^e; the fitted log-log
slope passes when the measured growth does not exceed the envelope by more
than the configured slack: slope >= e - slack on axes tending to zero,
slope <= e + slack on growing axes.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats


@dataclass
class FitResult:
    slope: float
    intercept: float
    band95: float
    npoints: int
    exponent: float = None
    slack: float = None
    direction: str = None

    @property
    def passed(self):
        if self.exponent is None:
            return None
        if self.direction == "to_zero":
            return self.slope >= self.exponent - self.slack
        return self.slope <= self.exponent + self.slack


def loglog_fit(xs, ys, exponent=None, slack=0.15, direction="to_zero"):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("insufficient points: need at least 3 for a fit")
    lx, ly = np.log(xs), np.log(ys)
    n = xs.size
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    sxx = np.sum((lx - lx.mean()) ** 2)
    if n > 2:
        se = np.sqrt(np.sum(resid ** 2) / (n - 2) / sxx)
        band = float(stats.t.ppf(0.975, n - 2) * se)
    else:
        band = np.inf
    return FitResult(slope=float(slope), intercept=float(intercept),
                     band95=band, npoints=n, exponent=exponent,
                     slack=slack, direction=direction)


def sweep_tilde_airy(eps_values, alpha, profile, grid, rng):
    """||psi||/||h|| against eps: envelope eps^(-1/3)."""
    from .airy_solvers import solve_tilde_airy
    from .data import random_decaying_field
    h = random_decaying_field(rng, grid, wall_zero=False)
    rows = []
    for eps in eps_values:
        sol = solve_tilde_airy(h, eps, alpha, profile, grid)
        rows.append({"eps": eps,
                     "ratio": grid.norm_l2(sol.psi) / grid.norm_l2(h),
                     "residual": sol.residual})
    fit = loglog_fit([r["eps"] for r in rows], [r["ratio"] for r in rows],
                     exponent=-1.0 / 3.0, direction="to_zero")
    return rows, fit


def sweep_os_high(alpha_values, eps, profile, grid, rng):
    """||(dY phi, alpha phi)||/||f|| against alpha: envelope alpha^-3."""
    from .orr_sommerfeld import solve_os_high_freq
    from .data import random_decaying_field
    f = random_decaying_field(rng, grid, wall_zero=False)
    rows = []
    for alpha in alpha_values:
        sol = solve_os_high_freq(f, eps, alpha, profile, grid)
        num = np.hypot(grid.norm_l2(grid.d1 @ sol.phi),
                       alpha * grid.norm_l2(sol.phi))
        rows.append({"alpha": alpha, "ratio": num / grid.norm_l2(f),
                     "residual": sol.residual})
    fit = loglog_fit([r["alpha"] for r in rows],
                     [r["ratio"] for r in rows],
                     exponent=-3.0, slack=0.3, direction="to_inf")
    return rows, fit


def sweep_stokes(n_hat_values, nu, lam, profile, grid, rng):
    """Velocity and density envelopes of the slip-Stokes solve in n_hat."""
    from .stokes import solve_stokes
    from .data import random_decaying_field
    q_rho = random_decaying_field(rng, grid, wall_zero=False)
    q_u = random_decaying_field(rng, grid, wall_zero=False)
    q_v = random_decaying_field(rng, grid, wall_zero=False)
    rows = []
    for n_hat in n_hat_values:
        alpha = n_hat * np.sqrt(nu)
        eps = 1.0 / n_hat
        sol = solve_stokes(q_rho, q_u, q_v, eps, alpha, lam, profile, grid)
        e1 = (grid.norm_l2(q_rho) + grid.norm_l2(q_u) + grid.norm_l2(q_v)
              + np.sqrt(nu) * np.hypot(grid.norm_l2(grid.d1 @ q_rho),
                                       alpha * grid.norm_l2(q_rho)))
        vel = np.hypot(grid.norm_l2(sol.u), grid.norm_l2(sol.v))
        dens = np.hypot(grid.norm_l2(grid.d1 @ sol.rho),
                        alpha * grid.norm_l2(sol.rho)) / profile.mach ** 2
        rows.append({"n_hat": n_hat, "alpha": alpha,
                     "vel_ratio": alpha * vel / e1,
                     "dens_ratio": dens / e1,
                     "residual": sol.residual})
    fit_vel = loglog_fit([r["n_hat"] for r in rows],
                         [r["vel_ratio"] for r in rows],
                         exponent=1.0 / 3.0, direction="to_inf")
    fit_dens = loglog_fit([r["n_hat"] for r in rows],
                          [r["dens_ratio"] for r in rows],
                          exponent=1.0 / 6.0, slack=0.1,
                          direction="to_inf")
    return rows, {"velocity": fit_vel, "density": fit_dens}


def sweep_linear_ns(nu_values, cfg, grid, profile, rng):
    """Gradient and Hessian envelopes of the linear solve in nu."""
    from .linear_solver import solve_linear_ns
    from .data import random_decaying_field
    zero = np.zeros(grid.n, dtype=complex)
    gu = random_decaying_field(rng, grid, wall_zero=False)
    gv = random_decaying_field(rng, grid, wall_zero=False)
    rows = []
    for nu in nu_values:
        data = {1: (zero, gu, gv), -1: (zero, np.conj(gu), np.conj(gv))}
        state = solve_linear_ns(data, nu, cfg.lam, cfg.torus_len, profile,
                                grid, thresholds=cfg.thresholds)
        dnorm = np.sqrt(2 * 2 * np.pi * cfg.torus_len * np.sqrt(nu)
                        * (grid.norm_l2(gu) ** 2 + grid.norm_l2(gv) ** 2))
        rows.append({"nu": nu,
                     "grad_ratio": state.norms["grad_ne"] / dnorm,
                     "hess_ratio": state.norms["hess_ne_uv"] / dnorm,
                     "ne_l2_ratio": state.norms["ne_l2"] / dnorm})
    fit_grad = loglog_fit([r["nu"] for r in rows],
                          [r["grad_ratio"] for r in rows],
                          exponent=-0.5, direction="to_zero")
    fit_hess = loglog_fit([r["nu"] for r in rows],
                          [r["hess_ratio"] for r in rows],
                          exponent=-13.0 / 8.0, direction="to_zero")
    return rows, {"gradient": fit_grad, "hessian": fit_hess}


def sweep_low_mach(m_values, cfg, grid, rng):
    from .nonlinear import low_mach_compare
    force = cfg.build_force(grid)
    report = low_mach_compare(
        list(m_values), force, cfg.nu, cfg.lam, cfg.torus_len, grid,
        cfg.n_max, gamma=cfg.gamma, decay_rate=cfg.s,
        thresholds=cfg.thresholds)
    rows = [{"m": m, "diff": d} for m, d in sorted(report["diffs"].items())]
    fit = None
    if len(rows) >= 2:
        fit = FitResult(slope=report["slope"], intercept=0.0, band95=np.inf,
                        npoints=len(rows), exponent=2.0, slack=0.3,
                        direction="to_zero")
    return rows, fit


SWEEP_AXES = ("nu", "eps", "alpha", "n_hat", "m")


def run_sweep(cfg, rng=None):
    """Dispatch the configured sweep; returns (rows, fits dict)."""
    rng = rng or np.random.default_rng(cfg.seed)
    grid = cfg.build_grid()
    profile = cfg.build_profile()
    values = cfg.sweep_values
    if len(values) < 3 and cfg.sweep_axis != "m":
        raise ValueError("insufficient points: need at least 3 sweep values")
    if cfg.sweep_axis == "eps":
        rows, fit = sweep_tilde_airy(values, 1.0, profile, grid, rng)
        return rows, {"tilde_airy": fit}
    if cfg.sweep_axis == "alpha":
        rows, fit = sweep_os_high(values, 1e-4, profile, grid, rng)
        return rows, {"os_high": fit}
    if cfg.sweep_axis == "n_hat":
        return sweep_stokes(values, cfg.nu, cfg.lam, profile, grid, rng)
    if cfg.sweep_axis == "nu":
        return sweep_linear_ns(values, cfg, grid, profile, rng)
    if cfg.sweep_axis == "m":
        rows, fit = sweep_low_mach(values, cfg, grid, rng)
        return rows, {"low_mach": fit}
    raise ValueError(f"unknown sweep axis {cfg.sweep_axis!r}; "
                     f"choose one of {SWEEP_AXES}")
