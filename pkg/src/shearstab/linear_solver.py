"""Per-mode solves of the full linearized system and their assembly.

Mode n=0 is solved by explicit quadrature formulas (the penalty limit of
the regularized system evaluated in closed form).  Nonzero modes are
solved with only v(0)=0 by alternating Stokes and quasi-compressible
stages, then corrected to no-slip by mixing in a boundary corrector.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .operators import ModeOperators
from .quasi_compressible import (solve_qc_inhomogeneous, homogeneous_qc,
                                 qc_error, qc_matrix)
from .stokes import solve_stokes, stokes_matrix, _block_row, _block_residual
from .orr_sommerfeld import IterationDiverged


DEFAULT_THRESHOLDS = {
    "kappa0": 0.8,   # low/middle split in alpha*eps^(1/3)
    "c1": 0.5,       # middle-regime validity window
    "c2": 3.0,
    "high": 2.5,     # middle/high split
}


def classify_regime(alpha, eps, thresholds=None):
    t = alpha * eps ** (1.0 / 3.0)
    th = {**DEFAULT_THRESHOLDS, **(thresholds or {})}
    if t <= th["kappa0"]:
        return "low"
    if t >= th["high"]:
        return "high"
    return "middle"


def full_matrix(ops, lam):
    """Dense 3N x 3N per-mode linearized operator, [rho; u; v] ordering.

    Shares every block composition with the Stokes and quasi-compressible
    matrices, so the operator identities between the three hold exactly."""
    key = ("l_matrix", float(lam))
    if key not in ops._mat:
        n = ops.grid.n
        mat = np.array(stokes_matrix(ops, lam), dtype=complex)
        # add the stretching term v*Us' to the u-momentum rows
        mat[n:2 * n, 2 * n:] += np.diag(ops.us1)
        ops._mat[key] = mat
    return ops._mat[key]


# ---------------------------------------------------------------------------
# zero mode


@dataclass
class ZeroModeSolution:
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    nu: float
    mass: complex
    residual: float
    diagnostics: dict = field(default_factory=dict)


def solve_zero_mode(g_rho, g_u, g_v, nu, lam, profile, grid):
    """Closed-form x-average solve on the boundary-layer grid.

    Fields are functions of Y with y = sqrt(nu)*Y; the data must be
    resolved on the truncated grid (decay beyond Y_max is logged, not
    integrated).
    """
    sq = np.sqrt(nu)
    g_rho = np.asarray(g_rho, dtype=complex)
    g_u = np.asarray(g_u, dtype=complex)
    g_v = np.asarray(g_v, dtype=complex)
    m2 = profile.mach ** 2
    us1 = profile.us(grid.nodes, 1)
    us2 = profile.us(grid.nodes, 2)

    # dy^-1 g_v = -int_y^inf g_v
    dyinv_gv = sq * grid.antiderivative(g_v, from_left=False)
    rho = m2 * (dyinv_gv + (1.0 + lam) * nu * g_rho)
    v = sq * grid.antiderivative(g_rho, from_left=True)
    integrand = g_u - v * us1 / sq - rho * us2
    du = -grid.antiderivative(integrand, from_left=False) / sq
    u = sq * grid.antiderivative(du, from_left=True)

    # residual of the x-averaged system (derivatives in y), each equation
    # normalized by the size of its own terms
    d_y = grid.d1 / sq
    terms1 = [d_y @ v, g_rho]
    terms2 = [v * us1 / sq, rho * us2, nu * (d_y @ (d_y @ u)), g_u]
    terms3 = [(d_y @ rho) / m2, (1.0 + lam) * nu * (d_y @ (d_y @ v)), g_v]
    r1 = terms1[0] - terms1[1]
    r2 = terms2[0] + terms2[1] - terms2[2] - terms2[3]
    r3 = terms3[0] - terms3[1] - terms3[2]

    def rel(r, terms, sl):
        w = grid.weights[sl]

        def wnorm(t):
            return float(np.sqrt(np.dot(w, np.abs(t[sl]) ** 2)))

        scale = sum(wnorm(t) for t in terms) + 1e-300
        return wnorm(r) / scale

    inner = slice(1, -1)
    res = max(rel(r1, terms1, slice(0, -1)), rel(r2, terms2, inner),
              rel(r3, terms3, inner))
    mass = sq * grid.integrate(rho)
    tail = float(abs(integrand[-1]) + abs(g_rho[-1]) + abs(g_v[-1]))
    return ZeroModeSolution(
        rho=rho, u=u, v=v, nu=nu, mass=complex(mass), residual=res,
        diagnostics={"tail": tail,
                     "v_l1_y": sq * grid.norm_l1(v),
                     "wall_u": abs(u[0]), "wall_v": abs(v[0])})


# ---------------------------------------------------------------------------
# slip problem (only v(0) = 0)


@dataclass
class SlipSolution:
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    alpha: float
    eps: float
    residual: float
    history: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def stack(self):
        return np.concatenate([self.rho, self.u, self.v])

    @property
    def wall_u(self):
        return self.u[0]


def _interior_rows_3n(n):
    skip = []
    for b in range(3):
        skip += [b * n, b * n + 1, b * n + n - 2, b * n + n - 1]
    return skip


def _slip_residual(ops, lam, rho, u, v, rhs3):
    mat = full_matrix(ops, lam)
    x = np.concatenate([rho, u, v])
    return _block_residual(mat, x, rhs3, ops.grid,
                           _interior_rows_3n(ops.grid.n))


def qc_stokes_iteration(f_rho, f_u, f_v, eps, alpha, lam, profile, grid,
                        ops=None, max_iter=40, tol_iter=1e-10):
    """Alternating Stokes / quasi-compressible solve of the slip problem.

    Each Stokes stage carries the current data and produces a stretching
    error; the quasi-compressible stage removes it and leaves a small
    viscous error that the next Stokes stage smooths.  Converges for small
    torus length (contraction ~ n_hat^{-1/3})."""
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    n = grid.n
    nu = ops.sqrt_nu ** 2
    f_rho = np.asarray(f_rho, dtype=complex)
    f_u = np.asarray(f_u, dtype=complex)
    f_v = np.asarray(f_v, dtype=complex)
    rhs3 = np.concatenate([f_rho, f_u, f_v])
    data_scale = max(grid.norm_l2(f_rho) + grid.norm_l2(f_u)
                     + grid.norm_l2(f_v), 1e-300)

    total = np.zeros(3 * n, dtype=complex)
    q = (f_rho, f_u, f_v)
    history = []
    rising = 0
    for k in range(max_iter):
        st = solve_stokes(q[0], q[1], q[2], eps, alpha, lam, profile, grid,
                          ops=ops)
        qc = solve_qc_inhomogeneous(-st.v * ops.us1, np.zeros(n), eps,
                                    alpha, profile, grid, ops=ops,
                                    regime="low", tol_iter=tol_iter * 1e-1)
        step = st.stack() + qc.stack()
        total += step
        e_u, e_v = qc_error(qc, nu, lam, profile, grid, ops=ops)
        err_norm = grid.norm_l2(e_u) + grid.norm_l2(e_v)
        inc = grid.norm_l2(st.v) + grid.norm_l2(qc.v)
        history.append(inc)
        if err_norm <= tol_iter * data_scale:
            break
        if len(history) >= 2 and history[-1] >= history[-2]:
            rising += 1
            if rising >= 3:
                raise IterationDiverged(
                    "Stokes/quasi-compressible alternation is not "
                    "contracting; reduce the torus length")
        else:
            rising = 0
        q = (np.zeros(n), -e_u, -e_v)
    else:
        raise IterationDiverged("slip iteration exceeded max_iter")

    rho, u, v = total[:n], total[n:2 * n], total[2 * n:]
    res = _slip_residual(ops, lam, rho, u, v, rhs3)
    return SlipSolution(rho=rho, u=u, v=v, alpha=alpha, eps=eps,
                        residual=res, history=history,
                        diagnostics={"stages": len(history),
                                     "wall_v": abs(v[0])})


def _slip_bcs(ops):
    n = ops.grid.n
    dirich0 = ops.bc_row("dirichlet", 0)
    dirichN = ops.bc_row("dirichlet", n - 1)
    neum0 = ops.bc_row("neumann", 0)
    return [
        (n, _block_row(n, 1, neum0), 0.0),            # dY u(0) = 0
        (2 * n - 1, _block_row(n, 1, dirichN), 0.0),
        (2 * n, _block_row(n, 2, dirich0), 0.0),      # v(0) = 0
        (3 * n - 1, _block_row(n, 2, dirichN), 0.0),
    ]


def solve_slip_high_freq(f_rho, f_u, f_v, eps, alpha, lam, profile, grid,
                         ops=None):
    """Direct dense solve of the slip problem, valid at high frequencies
    where tangential diffusion controls the stretching term; supplements
    v(0)=0 with dY(u)(0)=0."""
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    n = grid.n
    rhs = np.concatenate([np.asarray(f_rho, dtype=complex),
                          np.asarray(f_u, dtype=complex),
                          np.asarray(f_v, dtype=complex)])
    mat = full_matrix(ops, lam)
    x = ops.solve(("slip_high", float(lam)), mat, rhs, _slip_bcs(ops))
    rho, u, v = x[:n], x[n:2 * n], x[2 * n:]
    res = _block_residual(mat, x, rhs, grid,
                          [r for r, _, _ in _slip_bcs(ops)])
    return SlipSolution(rho=rho, u=u, v=v, alpha=alpha, eps=eps,
                        residual=res,
                        diagnostics={"wall_v": abs(v[0])})


def solve_slip(f_rho, f_u, f_v, eps, alpha, lam, profile, grid, ops=None,
               thresholds=None, max_iter=40, tol_iter=1e-10):
    regime = classify_regime(alpha, eps, thresholds)
    if regime == "high":
        sol = solve_slip_high_freq(f_rho, f_u, f_v, eps, alpha, lam,
                                   profile, grid, ops=ops)
    else:
        sol = qc_stokes_iteration(f_rho, f_u, f_v, eps, alpha, lam, profile,
                                  grid, ops=ops, max_iter=max_iter,
                                  tol_iter=tol_iter)
    sol.diagnostics["regime"] = regime
    return sol


# ---------------------------------------------------------------------------
# boundary correctors and no-slip modes


# measured floors for |u_b(0)|, as fractions of the regime's predicted scale
CORRECTOR_FLOORS = {"low": 0.2, "middle": 0.05, "high": 0.9}


def boundary_corrector(regime, eps, alpha, lam, profile, grid, ops=None,
                       thresholds=None, tol_iter=1e-10):
    """Homogeneous solution of the full per-mode system with v(0)=0 and
    u(0) away from zero: quasi-compressible leading part plus a slip-solved
    remainder absorbing its viscous error.  Data independent, so cached on
    the operator set."""
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    cache_key = ("corrector", regime, float(lam))
    if cache_key in ops._mat:
        return ops._mat[cache_key]
    nu = ops.sqrt_nu ** 2
    qch = homogeneous_qc(regime, eps, alpha, profile, grid, ops=ops,
                         thresholds=thresholds, tol_iter=tol_iter * 1e-1)
    e_u, e_v = qc_error(qch, nu, lam, profile, grid, ops=ops)
    zero = np.zeros(grid.n)
    if regime == "high":
        rem = solve_slip_high_freq(zero, -e_u, -e_v, eps, alpha, lam,
                                   profile, grid, ops=ops)
    else:
        rem = qc_stokes_iteration(zero, -e_u, -e_v, eps, alpha, lam,
                                  profile, grid, ops=ops, tol_iter=tol_iter)
    rho = qch.rho + rem.rho
    u = qch.u + rem.u
    v = qch.v + rem.v
    res = _slip_residual(ops, lam, rho, u, v, np.zeros(3 * grid.n))
    sol = SlipSolution(rho=rho, u=u, v=v, alpha=alpha, eps=eps,
                       residual=res,
                       diagnostics={"regime": regime,
                                    "qc_wall_u": qch.u[0],
                                    "rem_wall_u": rem.u[0],
                                    "wall_v": abs(v[0])})
    # usability floor: the mixing coefficient divides by u_b(0)
    t = alpha * eps ** (1.0 / 3.0)
    if regime == "low":
        scale = 1.0 / alpha + eps ** (-1.0 / 3.0)
    elif regime == "middle":
        scale = eps ** (1.0 / 3.0)
    else:
        scale = 1.0 / (4.0 * alpha)
    floor = CORRECTOR_FLOORS[regime] * scale
    if abs(sol.wall_u) < floor:
        raise RuntimeError(
            f"boundary corrector unusable: |u_b(0)|={abs(sol.wall_u):.3g} "
            f"below the {regime}-regime floor {floor:.3g} "
            f"(alpha*eps^(1/3)={t:.3g})")
    sol.diagnostics["floor"] = floor
    ops._mat[cache_key] = sol
    return sol


@dataclass
class ModeSolution:
    n: int
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    alpha: float
    eps: float
    regime: str
    residual: float
    mixing: complex
    diagnostics: dict = field(default_factory=dict)

    def stack(self):
        return np.concatenate([self.rho, self.u, self.v])


def solve_mode(n, g_rho, g_u, g_v, nu, lam, torus_len, profile, grid,
               ops=None, thresholds=None, max_iter=40, tol_iter=1e-10):
    """No-slip solution of mode n: slip solve plus corrector mixing.

    Input data are the modes of the unscaled sources; the sqrt(nu)
    rescaling to the boundary-layer variables happens here.
    """
    if n == 0:
        raise ValueError("mode 0 is handled by solve_zero_mode")
    if n < 0:
        # conjugating the system maps mode -n onto mode n
        sol = solve_mode(-n, np.conj(g_rho), np.conj(g_u), np.conj(g_v),
                         nu, lam, torus_len, profile, grid, ops=ops,
                         thresholds=thresholds, max_iter=max_iter,
                         tol_iter=tol_iter)
        sol.n = n
        sol.rho = np.conj(sol.rho)
        sol.u = np.conj(sol.u)
        sol.v = np.conj(sol.v)
        sol.mixing = np.conj(sol.mixing)
        return sol
    n_hat = n / torus_len
    alpha = n_hat * np.sqrt(nu)
    eps = 1.0 / n_hat
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    sq = np.sqrt(nu)
    f_rho = sq * np.asarray(g_rho, dtype=complex)
    f_u = sq * np.asarray(g_u, dtype=complex)
    f_v = sq * np.asarray(g_v, dtype=complex)

    regime = classify_regime(alpha, eps, thresholds)
    slip = solve_slip(f_rho, f_u, f_v, eps, alpha, lam, profile, grid,
                      ops=ops, thresholds=thresholds, max_iter=max_iter,
                      tol_iter=tol_iter)
    corr = boundary_corrector(regime, eps, alpha, lam, profile, grid,
                              ops=ops, thresholds=thresholds,
                              tol_iter=tol_iter)
    mix = slip.wall_u / corr.wall_u
    rho = slip.rho - mix * corr.rho
    u = slip.u - mix * corr.u
    v = slip.v - mix * corr.v
    rhs3 = np.concatenate([f_rho, f_u, f_v])
    res = _slip_residual(ops, lam, rho, u, v, rhs3)
    return ModeSolution(
        n=n, rho=rho, u=u, v=v, alpha=float(alpha), eps=float(eps),
        regime=regime, residual=res, mixing=complex(mix),
        diagnostics={
            "wall_u": abs(u[0]), "wall_v": abs(v[0]),
            "slip_wall_u": abs(slip.wall_u),
            "corr_wall_u": abs(corr.wall_u),
            "slip_residual": slip.residual,
            "corr_residual": corr.residual,
            "stages": slip.diagnostics.get("stages", 0),
        })


def dense_noslip_mode(n, g_rho, g_u, g_v, nu, lam, torus_len, profile,
                      grid, ops=None):
    """Dense direct no-slip solve of one mode: the oracle for solve_mode."""
    if n <= 0:
        raise ValueError("oracle expects a positive mode index")
    n_hat = n / torus_len
    alpha = n_hat * np.sqrt(nu)
    eps = 1.0 / n_hat
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    gn = grid.n
    sq = np.sqrt(nu)
    rhs = sq * np.concatenate([np.asarray(g_rho, dtype=complex),
                               np.asarray(g_u, dtype=complex),
                               np.asarray(g_v, dtype=complex)])
    dirich0 = ops.bc_row("dirichlet", 0)
    dirichN = ops.bc_row("dirichlet", gn - 1)
    bcs = [
        (gn, _block_row(gn, 1, dirich0), 0.0),            # u(0) = 0
        (2 * gn - 1, _block_row(gn, 1, dirichN), 0.0),
        (2 * gn, _block_row(gn, 2, dirich0), 0.0),        # v(0) = 0
        (3 * gn - 1, _block_row(gn, 2, dirichN), 0.0),
    ]
    mat = full_matrix(ops, lam)
    x = ops.solve(("noslip_dense", float(lam)), mat, rhs, bcs)
    res = _block_residual(mat, x, rhs, grid, [r for r, _, _ in bcs])
    return ModeSolution(
        n=n, rho=x[:gn], u=x[gn:2 * gn], v=x[2 * gn:],
        alpha=float(alpha), eps=float(eps), regime="dense",
        residual=res, mixing=0.0 + 0j)


# ---------------------------------------------------------------------------
# assembly over modes


@dataclass
class FlowState:
    zero: ZeroModeSolution
    modes: dict                    # n -> ModeSolution
    nu: float
    torus_len: float
    mach: float
    norms: dict = field(default_factory=dict)

    def mode_fields(self, name):
        """dict n -> field array (including the zero mode)."""
        out = {}
        if self.zero is not None:
            out[0] = getattr(self.zero, name)
        for n, sol in self.modes.items():
            out[n] = getattr(sol, name)
        return out

    def hermitian_defect(self):
        """max |f_{-n} - conj(f_n)| over stored mode pairs."""
        worst = 0.0
        for n, sol in self.modes.items():
            other = self.modes.get(-n)
            if other is None:
                continue
            for name in ("rho", "u", "v"):
                d = np.abs(getattr(other, name)
                           - np.conj(getattr(sol, name))).max()
                worst = max(worst, d)
        return worst


def sobolev_mode_norm(modes, order, nu, torus_len, grid):
    """L2(Omega) norm of the order-th gradient of a mode dict.

    Fields are functions of Y (y = sqrt(nu) Y); x-derivatives bring
    i*n/torus_len, y-derivatives nu^(-1/2) dY."""
    sq = np.sqrt(nu)
    total = 0.0
    area = 2.0 * np.pi * torus_len
    dmats = [None, grid.d1, grid.d2, grid.d3]
    for n, vals in modes.items():
        vals = np.asarray(vals, dtype=complex)
        khat = n / torus_len
        for j in range(order + 1):  # j y-derivatives, order-j x-derivatives
            dy = vals if j == 0 else dmats[j] @ vals
            term = (abs(khat) ** (order - j) * sq ** (-j)) ** 2 \
                * grid.norm_l2(dy) ** 2
            total += comb(order, j) * term
    return float(np.sqrt(area * sq * total))


def assemble_norms(state, grid):
    """Solution-space norm pieces of a FlowState (the anisotropic norm and
    its lower-order variants)."""
    nu = state.nu
    m2 = state.mach ** 2
    L = state.torus_len
    sq = np.sqrt(nu)
    z = state.zero

    rho_w = {n: v / m2 for n, v in state.mode_fields("rho").items()}
    u_m = state.mode_fields("u")
    v_m = state.mode_fields("v")
    rho_ne = {n: v for n, v in rho_w.items() if n != 0}
    u_ne = {n: v for n, v in u_m.items() if n != 0}
    v_ne = {n: v for n, v in v_m.items() if n != 0}
    area = 2.0 * np.pi * L

    def l2_omega(md):
        return float(np.sqrt(sum(
            area * sq * grid.norm_l2(v) ** 2 for v in md.values())))

    def grad_all(md, order):
        return sobolev_mode_norm(md, order, nu, L, grid)

    def grad_joint(mds, order):
        return float(np.hypot.reduce([grad_all(md, order) for md in mds]))

    norms = {}
    if z is not None:
        norms["v0_l1"] = sq * grid.norm_l1(z.v)
        norms["zero_linf"] = max(np.abs(z.rho / m2).max(),
                                 np.abs(z.u).max(), np.abs(z.v).max())
        norms["zero_l2"] = float(np.hypot(sq ** 0.5 * grid.norm_l2(z.rho / m2),
                                          sq ** 0.5 * grid.norm_l2(z.v)))
    norms["ne_l2"] = float(np.hypot.reduce(
        [l2_omega(rho_ne), l2_omega(u_ne), l2_omega(v_ne)]))
    norms["grad"] = grad_joint([rho_w, u_m, v_m], 1)
    norms["grad_ne"] = grad_joint([rho_ne, u_ne, v_ne], 1)
    norms["hess_uv"] = grad_joint([u_m, v_m], 2)
    norms["hess_ne_uv"] = grad_joint([u_ne, v_ne], 2)
    norms["hess_rho"] = grad_all(rho_w, 2)
    norms["third_uv"] = grad_joint([u_m, v_m], 3)

    norms["norm_1"] = (norms.get("v0_l1", 0.0) + norms.get("zero_linf", 0.0)
                       + norms.get("zero_l2", 0.0) + norms["ne_l2"]
                       + nu ** 0.5 * norms["grad"]
                       + nu ** (13.0 / 8.0) * norms["hess_uv"])
    norms["norm_2"] = (norms["norm_1"]
                       + nu ** (13.0 / 8.0) * norms["hess_rho"]
                       + nu ** (21.0 / 8.0) * norms["third_uv"])
    state.norms.update(norms)
    return norms


def solve_linear_ns(data_modes, nu, lam, torus_len, profile, grid,
                    thresholds=None, max_iter=40, tol_iter=1e-10,
                    ops_cache=None):
    """Solve the linearized system for a dict n -> (g_rho, g_u, g_v).

    Returns a FlowState with assembled norms.  ops_cache, if given, maps n
    to ModeOperators and is filled on first use (reused across repeated
    solves at the same parameters, e.g. inside the nonlinear loop).
    """
    zero = None
    modes = {}
    for n in sorted(data_modes):
        g_rho, g_u, g_v = data_modes[n]
        if n == 0:
            zero = solve_zero_mode(g_rho, g_u, g_v, nu, lam, profile, grid)
            continue
        ops = None
        if ops_cache is not None:
            n_hat = abs(n) / torus_len
            ops = ops_cache.setdefault(
                abs(n), ModeOperators(grid, profile, n_hat * np.sqrt(nu),
                                      1.0 / n_hat))
        sol = solve_mode(n, g_rho, g_u, g_v, nu, lam, torus_len, profile,
                         grid, ops=ops, thresholds=thresholds,
                         max_iter=max_iter, tol_iter=tol_iter)
        modes[n] = sol
    if zero is None:
        gn = grid.n
        zdata = np.zeros(gn)
        zero = solve_zero_mode(zdata, zdata, zdata, nu, lam, profile, grid)
    state = FlowState(zero=zero, modes=modes, nu=nu, torus_len=torus_len,
                      mach=profile.mach)
    assemble_norms(state, grid)
    return state
