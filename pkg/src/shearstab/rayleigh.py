"""Compressible Rayleigh solves: the inviscid backbone of the mode theory.

The second-order operator Us*(dY(A^-1 dY .) - alpha^2) - c degenerates at
the wall; solves use the form divided by Us*A^-1, which is regular for
profiles with Us''(0)=0 (the built-in tanh profile).
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import ModeOperators, divide_by_us, relative_residual


@dataclass
class RayleighSolution:
    phi: np.ndarray
    alpha: float
    boundary_trace: complex        # dY phi(0)
    residual: float
    c_e: float = None              # fitted free-stream constant (alpha < 1)
    diagnostics: dict = field(default_factory=dict)


def _ray_bcs(ops, wall_value):
    n = ops.grid.n
    return [(0, ops.bc_row("dirichlet", 0), wall_value),
            (n - 1, ops.bc_row("dirichlet", n - 1), 0.0)]


def solve_rayleigh_inhomogeneous(h, alpha, profile, grid, ops=None):
    """Unique decaying solution of Ray(phi) = h with phi(0) = 0.

    h must vanish at the wall (h/Us square integrable); otherwise the
    problem is rejected.
    """
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps=1.0)
    h = np.asarray(h, dtype=complex)
    h_over_us = divide_by_us(h, grid, profile)
    rhs = ops.a * h_over_us
    phi = ops.solve("ray_dirichlet", ops.ray_divided, rhs, _ray_bcs(ops, 0.0))
    res = relative_residual(ops.ray, phi, h, grid, (0, grid.n - 1))
    return RayleighSolution(
        phi=phi,
        alpha=float(alpha),
        boundary_trace=complex(grid.d1[0] @ phi),
        residual=res,
        diagnostics={"h_over_us_l2": grid.norm_l2(h_over_us)},
    )


def solve_rayleigh_homogeneous(alpha, profile, grid, ops=None):
    """Decaying solution of Ray(phi) = 0 with phi(0) = 1.

    For alpha < 1 the free-stream constant c_E of the leading component
    (c_E/alpha) Us exp(-alpha sqrt(A_inf) Y) is extracted by a weighted
    least-squares projection onto that template.
    """
    if ops is None:
        ops = ModeOperators(grid, profile, alpha, eps=1.0)
    phi = ops.solve("ray_dirichlet", ops.ray_divided,
                    np.zeros(grid.n, dtype=complex), _ray_bcs(ops, 1.0))
    res = relative_residual(ops.ray, phi, np.zeros(grid.n), grid,
                            (0, grid.n - 1))
    sol = RayleighSolution(
        phi=phi,
        alpha=float(alpha),
        boundary_trace=complex(grid.d1[0] @ phi),
        residual=res,
    )
    if alpha < 1.0:
        template = (ops.us / alpha) * np.exp(
            -alpha * np.sqrt(profile.a_inf) * grid.nodes)
        w = grid.weights
        denom = np.dot(w, template * template)
        sol.c_e = float(np.real(np.dot(w, template * phi) / denom))
        sol.diagnostics["template_l2"] = grid.norm_l2(template)
    return sol
