"""Quasi-compressible system: stream-function lifts and its solutions.

The approximate system replaces the physical viscosity by an artificial
one acting through the modified vorticity, which decouples the fluid
variables: a stream function phi determines v = -i*alpha*phi,
u = dY(phi) - Us*rho, and the density through the wall-normal momentum
balance.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import ModeOperators, relative_residual
from .orr_sommerfeld import solve_os_full, solve_os_high_freq, slow_mode, \
    fast_mode


@dataclass
class FluidTriple:
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    d_q: np.ndarray                # divergence i*alpha*u + dY v
    alpha: float
    eps: float
    residual: float = None         # momentum-row residual of the QC system
    continuity_defect: float = None
    diagnostics: dict = field(default_factory=dict)

    def stack(self):
        return np.concatenate([self.rho, self.u, self.v])


def qc_matrix(ops):
    """Dense 3N x 3N quasi-compressible operator [rho; u; v] ordering."""
    key = "lq_matrix"
    if key not in ops._mat:
        n = ops.grid.n
        i_a = 1j * ops.alpha
        sq = ops.sqrt_nu
        us = np.diag(ops.us)
        us1 = np.diag(ops.us1)
        m2 = ops.profile.mach ** 2
        d1, ident = ops.grid.d1, np.eye(n)
        da = ops.delta_alpha
        zero = np.zeros((n, n))
        row_rho = [i_a * us, i_a * ident, d1]
        row_u = [-sq * da @ us + i_a / m2 * ident,
                 -sq * da + i_a * us, us1]
        row_v = [d1 / m2, zero, -sq * da + i_a * us]
        ops._mat[key] = np.block([row_rho, row_u, row_v])
    return ops._mat[key]


def lift_to_fluid(phi, f_u, f_v, eps, alpha, profile, grid, ops=None):
    """Fluid triple of a stream function, per the effective-stream-function
    relations.

    The density comes from the wall-normal momentum identity
    m^-2 dY(rho) = -i*eps*alpha^2 Delta_a(phi) - alpha^2 Us phi + f_v
    anchored at Y_max (where the direct formula is evaluated once); this
    avoids the third derivative of phi in the bulk.
    """
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    phi = np.asarray(phi, dtype=complex)
    f_u = np.zeros(grid.n) if f_u is None else np.asarray(f_u, dtype=complex)
    f_v = np.zeros(grid.n) if f_v is None else np.asarray(f_v, dtype=complex)
    m2 = profile.mach ** 2

    dphi = grid.d1 @ phi
    da_phi = ops.delta_alpha @ phi
    rhs = m2 * (-1j * eps * alpha ** 2 * da_phi
                - alpha ** 2 * ops.us * phi + f_v)
    # anchor: the direct expression for rho at the last node
    d3 = grid.d1 @ da_phi
    direct = -m2 * ops.ainv * (1j * eps * d3 + ops.us * dphi
                               - ops.us1 * phi + 1j / alpha * f_u)
    rho = grid.antiderivative(rhs, from_left=False) + direct[-1]
    u = dphi - ops.us * rho
    v = -1j * alpha * phi
    d_q = 1j * alpha * u + grid.d1 @ v

    triple = FluidTriple(rho=rho, u=u, v=v, d_q=d_q,
                         alpha=float(alpha), eps=float(eps))
    _qc_residuals(triple, f_u, f_v, ops)
    return triple


def _qc_residuals(triple, f_u, f_v, ops):
    grid = ops.grid
    n = grid.n
    lq = qc_matrix(ops)
    x = triple.stack()
    rhs = np.concatenate([np.zeros(n), f_u, f_v])
    r = lq @ x - rhs
    cancel = np.abs(lq) @ np.abs(x)
    w = np.sqrt(np.concatenate([grid.weights] * 3))
    num = np.linalg.norm(w * r)
    den = np.linalg.norm(w * rhs) + np.linalg.norm(w * cancel)
    triple.residual = num / den if den > 0 else num
    cont = 1j * triple.alpha * ops.us * triple.rho + triple.d_q
    scale = grid.norm_l2(triple.d_q) + grid.norm_l2(ops.us * triple.rho)
    triple.continuity_defect = (grid.norm_l2(cont) / scale
                                if scale > 0 else 0.0)


def solve_qc_inhomogeneous(f_u, f_v, eps, alpha, profile, grid, ops=None,
                           regime=None, high_threshold=2.5, tol_iter=1e-11):
    """Quasi-compressible solution with v(0)=0 for momentum data.

    The stream function solves the fourth-order mode equation with source
    -f_v - (i/alpha) dY(A^-1 f_u); low and middle frequencies go through
    the iteration scheme, high frequencies through the direct solve.
    """
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    f_u = np.asarray(f_u, dtype=complex)
    f_v = np.asarray(f_v, dtype=complex)
    src = -f_v - 1j / alpha * (grid.d1 @ (ops.ainv * f_u))
    if regime is None:
        regime = "high" if alpha * eps ** (1 / 3) >= high_threshold else "low"
    if regime == "high":
        os_sol = solve_os_high_freq(src, eps, alpha, profile, grid, ops=ops,
                                    threshold=high_threshold)
    else:
        os_sol = solve_os_full(src, eps, alpha, profile, grid, ops=ops,
                               deriv_form=True, tol_iter=tol_iter)
    triple = lift_to_fluid(os_sol.phi, f_u, f_v, eps, alpha, profile, grid,
                           ops=ops)
    triple.diagnostics["os_residual"] = os_sol.residual
    triple.diagnostics["os_iterations"] = os_sol.iterations
    return triple


def homogeneous_qc(regime, eps, alpha, profile, grid, ops=None,
                   thresholds=None, tol_iter=1e-11):
    """Nontrivial solution of the homogeneous quasi-compressible system
    with v(0)=0 and u(0) bounded away from zero.

    low regime: fast minus slow mode; middle/high: the fast mode alone
    (whose stream function already vanishes at the wall).
    """
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    if regime == "low":
        fast = fast_mode(eps, alpha, "low", profile, grid, ops=ops,
                         thresholds=thresholds, tol_iter=tol_iter)
        slow = slow_mode(eps, alpha, profile, grid, ops=ops,
                         tol_iter=tol_iter)
        phi = fast.phi - slow.phi
        info = {"fast_slope": fast.wall_slope, "slow_slope": slow.wall_slope}
    else:
        fast = fast_mode(eps, alpha, regime, profile, grid, ops=ops,
                         thresholds=thresholds, tol_iter=tol_iter)
        phi = fast.phi
        info = {"fast_slope": fast.wall_slope,
                "predicted_slope": fast.predicted_slope}
    triple = lift_to_fluid(phi, None, None, eps, alpha, profile, grid,
                           ops=ops)
    triple.diagnostics.update(info)
    triple.diagnostics["regime"] = regime
    return triple


def qc_error(triple, nu, lam, profile, grid, ops=None):
    """Momentum error fields (e_u, e_v) with L - L_Q = (0, e_u, e_v) applied
    to the triple: the singular error the Stokes stage smooths out."""
    if ops is None:
        ops = ModeOperators(grid, profile, triple.alpha, triple.eps)
    sq = np.sqrt(nu)
    e_u = sq * (ops.delta_alpha @ (ops.us * triple.rho)
                + ops.us2 * triple.rho
                - lam * 1j * triple.alpha * triple.d_q)
    e_v = -lam * sq * (grid.d1 @ triple.d_q)
    return e_u, e_v
