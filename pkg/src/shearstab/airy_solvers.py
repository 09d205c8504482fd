"""Viscous Airy-type boundary-value solves.

Two flavours enter the mode construction: the compressible (tilde) Airy
equation i*eps*Lam(psi) + Us*psi = h with Dirichlet data, and the classical
Airy equation i*eps*Delta_a(xi) + Us*xi = dY(g) with Neumann data.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import ModeOperators, relative_residual


@dataclass
class AirySolution:
    psi: np.ndarray
    eps: float
    alpha: float
    residual: float
    diagnostics: dict = field(default_factory=dict)


def _check_regime(alpha, eps, regime_bound):
    t = alpha * eps ** (1.0 / 3.0)
    if t > regime_bound:
        raise ValueError(f"alpha*eps^(1/3) = {t:.3g} exceeds the validity "
                         f"bound {regime_bound}")


def solve_tilde_airy(h, eps, alpha, profile, grid, ops=None,
                     regime_bound=8.0):
    """Solve i*eps*Lam(psi) + Us*psi = h, psi(0) = 0, decaying."""
    _check_regime(alpha, eps, regime_bound)
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    n = grid.n
    h = np.asarray(h, dtype=complex)
    bcs = [(0, ops.bc_row("dirichlet", 0), 0.0),
           (n - 1, ops.bc_row("dirichlet", n - 1), 0.0)]
    psi = ops.solve("tilde_airy_dirichlet", ops.tilde_airy, h, bcs)
    res = relative_residual(ops.tilde_airy, psi, h, grid, (0, n - 1))
    return AirySolution(psi=psi, eps=eps, alpha=alpha, residual=res)


def solve_classical_airy_neumann(g, eps, alpha, profile, grid, ops=None,
                                 rel_tol=1e-8):
    """Solve i*eps*Delta_a(xi) + Us*xi = dY(g), dY xi(0) = 0, decaying.

    g must vanish at the wall; the right-hand side is formed with the grid
    derivative so that hypothesis is checkable.
    """
    g = np.asarray(g, dtype=complex)
    scale = np.abs(g).max()
    if scale > 0 and abs(g[0]) > rel_tol * scale:
        raise ValueError("g(0) != 0: Neumann Airy problem requires wall-"
                         "vanishing data")
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps)
    n = grid.n
    rhs = grid.d1 @ g
    bcs = [(0, ops.bc_row("neumann", 0), 0.0),
           (n - 1, ops.bc_row("dirichlet", n - 1), 0.0)]
    xi = ops.solve("airy_neumann", ops.airy_neumann, rhs, bcs)
    res = relative_residual(ops.airy_neumann, xi, rhs, grid, (0, n - 1))
    mass = ops.grid.integrate(ops.us * xi)
    return AirySolution(psi=xi, eps=eps, alpha=alpha, residual=res,
                        diagnostics={"us_mass": complex(mass)})
