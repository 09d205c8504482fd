"""Stokes regularizing system: the smoothing half of the mode iteration.

Relative to the full per-mode system the stretching term v*Us' is removed
and the wall condition on u is the slip one dY(u)(0)=0.  The three fields
are solved as one coupled dense system; the a priori estimate order of the
underlying theory is replaced by the factorization plus post-hoc residual
checks.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import ModeOperators


@dataclass
class StokesSolution:
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    alpha: float
    eps: float
    residual: float
    diagnostics: dict = field(default_factory=dict)

    def stack(self):
        return np.concatenate([self.rho, self.u, self.v])


def stokes_matrix(ops, lam):
    """Dense 3N x 3N slip-Stokes operator, [rho; u; v] ordering."""
    key = ("ls_matrix", float(lam))
    if key not in ops._mat:
        n = ops.grid.n
        i_a = 1j * ops.alpha
        sq = ops.sqrt_nu
        m2 = ops.profile.mach ** 2
        us = np.diag(ops.us)
        d1, ident = ops.grid.d1, np.eye(n)
        da = ops.delta_alpha
        zero = np.zeros((n, n))
        # div_alpha blocks acting on (u, v)
        div_u, div_v = i_a * ident, d1
        row_rho = [i_a * us, div_u, div_v]
        row_u = [(i_a / m2) * ident + sq * np.diag(ops.us2),
                 i_a * us - sq * da - lam * sq * i_a * div_u,
                 -lam * sq * i_a * div_v]
        row_v = [d1 / m2,
                 -lam * sq * d1 @ div_u,
                 i_a * us - sq * da - lam * sq * d1 @ div_v]
        ops._mat[key] = np.block([row_rho, row_u, row_v])
    return ops._mat[key]


def _block_row(n, block, vec):
    row = np.zeros(3 * n, dtype=complex)
    row[block * n:(block + 1) * n] = vec
    return row


def stokes_bcs(ops):
    n = ops.grid.n
    dirich0 = ops.bc_row("dirichlet", 0)
    dirichN = ops.bc_row("dirichlet", n - 1)
    neum0 = ops.bc_row("neumann", 0)
    return [
        (n, _block_row(n, 1, neum0), 0.0),            # dY u(0) = 0
        (2 * n - 1, _block_row(n, 1, dirichN), 0.0),  # u(Ymax) = 0
        (2 * n, _block_row(n, 2, dirich0), 0.0),      # v(0) = 0
        (3 * n - 1, _block_row(n, 2, dirichN), 0.0),  # v(Ymax) = 0
    ]


def _block_residual(matrix, x, rhs, grid, skip_rows):
    r = matrix @ x - rhs
    mask = np.ones(x.size, dtype=bool)
    mask[list(skip_rows)] = False
    cancel = np.abs(matrix) @ np.abs(x)
    w = np.sqrt(np.concatenate([grid.weights] * 3))
    num = np.linalg.norm((w * r)[mask])
    den = (np.linalg.norm((w * rhs)[mask])
           + np.linalg.norm((w * cancel)[mask]))
    return num / den if den > 0 else num


def solve_stokes(q_rho, q_u, q_v, eps, alpha, lam, profile, grid, ops=None):
    """Unique solution of the slip-Stokes system for data (q_rho, q_u, q_v).

    eps and alpha encode the mode frequency (sqrt(nu) = eps*alpha).
    """
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    n = grid.n
    rhs = np.concatenate([np.asarray(q_rho, dtype=complex),
                          np.asarray(q_u, dtype=complex),
                          np.asarray(q_v, dtype=complex)])
    bcs = stokes_bcs(ops)
    mat = stokes_matrix(ops, lam)
    x = ops.solve(("stokes", float(lam)), mat, rhs, bcs)
    res = _block_residual(mat, x, rhs, grid, [r for r, _, _ in bcs])
    sol = StokesSolution(rho=x[:n], u=x[n:2 * n], v=x[2 * n:],
                         alpha=float(alpha), eps=float(eps), residual=res)
    sol.diagnostics["slip_defect"] = abs(grid.d1[0] @ sol.u)
    sol.diagnostics["wall_v"] = abs(sol.v[0])
    return sol
