import numpy as np
import pytest

from shearstab.operators import ModeOperators
from shearstab.airy_solvers import solve_tilde_airy, \
    solve_classical_airy_neumann
from shearstab.data import random_decaying_field


def test_zero_data(grid, profile):
    sol = solve_tilde_airy(np.zeros(grid.n), 1e-3, 1.0, profile, grid)
    assert np.abs(sol.psi).max() == 0.0
    sol2 = solve_classical_airy_neumann(np.zeros(grid.n), 1e-3, 1.0,
                                        profile, grid)
    assert np.abs(sol2.psi).max() == 0.0


def test_tilde_airy_manufactured(grid, profile):
    eps, alpha = 1e-3, 1.0
    ops = ModeOperators(grid, profile, alpha, eps)
    target = grid.nodes * np.exp(-grid.nodes)
    h = ops.tilde_airy @ target
    sol = solve_tilde_airy(h, eps, alpha, profile, grid, ops)
    assert np.abs(sol.psi - target).max() <= 1e-8
    assert sol.residual <= 1e-12


def test_classical_airy_manufactured(grid, profile):
    eps, alpha = 1e-3, 1.0
    ops = ModeOperators(grid, profile, alpha, eps)
    target = grid.nodes ** 2 * np.exp(-grid.nodes)   # dY target(0) = 0
    rhs = ops.airy_neumann @ target
    g = grid.antiderivative(rhs, from_left=True)     # g(0) = 0
    sol = solve_classical_airy_neumann(g, eps, alpha, profile, grid, ops)
    assert np.abs(sol.psi - target).max() <= 1e-7
    assert sol.residual <= 1e-12


def test_regime_guard(grid, profile):
    with pytest.raises(ValueError):
        solve_tilde_airy(np.zeros(grid.n), 1.0, 20.0, profile, grid,
                         regime_bound=8.0)


def test_neumann_rejects_wall_data(grid, profile):
    g = np.exp(-grid.nodes)
    with pytest.raises(ValueError):
        solve_classical_airy_neumann(g, 1e-3, 1.0, profile, grid)


def test_residual_random(grid, profile, rng):
    ops = ModeOperators(grid, profile, 1.0, 1e-3)
    for _ in range(8):
        h = random_decaying_field(rng, grid, wall_zero=False)
        assert solve_tilde_airy(h, 1e-3, 1.0, profile, grid,
                                ops).residual <= 1e-12
        g = random_decaying_field(rng, grid)
        assert solve_classical_airy_neumann(g, 1e-3, 1.0, profile, grid,
                                            ops).residual <= 1e-12


def test_eps_sweep_growth_envelope(grid, profile, rng):
    """||psi||/||h|| grows no faster than eps^(-1/3)."""
    h = random_decaying_field(rng, grid, wall_zero=False)
    eps_values = np.array([1e-2, 3e-3, 1e-3, 3e-4, 1e-4])
    ratios = []
    for eps in eps_values:
        sol = solve_tilde_airy(h, eps, 1.0, profile, grid)
        ratios.append(grid.norm_l2(sol.psi) / grid.norm_l2(h))
    slope = np.polyfit(np.log(eps_values), np.log(ratios), 1)[0]
    assert slope >= -1.0 / 3.0 - 0.15


def test_delta_alpha_envelope(grid, profile, rng):
    """eps * ||Delta_a psi|| stays bounded by the data."""
    h = random_decaying_field(rng, grid, wall_zero=False)
    ops = {}
    for eps in (1e-2, 1e-3, 1e-4):
        o = ModeOperators(grid, profile, 1.0, eps)
        sol = solve_tilde_airy(h, eps, 1.0, profile, grid, o)
        ratio = eps * grid.norm_l2(o.delta_alpha @ sol.psi) \
            / grid.norm_l2(h)
        assert ratio <= 5.0


def test_conormal_ratio_bounded(grid, profile, rng):
    """Weighted derivative of the solution against weighted data norms
    stays bounded along an eps sweep."""
    h = random_decaying_field(rng, grid)
    y = grid.nodes
    us = profile.us(y)
    dh = grid.d1 @ h
    data = grid.norm_l2(y * dh) + grid.norm_l2(h)
    for eps in (1e-2, 1e-3, 1e-4):
        sol = solve_tilde_airy(h, eps, 1.0, profile, grid)
        num = grid.norm_l2(us * y * (grid.d1 @ sol.psi))
        assert num / data <= 10.0


def test_neumann_mass_alpha_scaling(grid, profile, rng):
    """|int Us xi| scales like alpha^2 for small alpha at fixed data."""
    g = random_decaying_field(rng, grid)
    alphas = np.array([0.1, 0.2, 0.4, 0.8])
    masses = []
    for a in alphas:
        sol = solve_classical_airy_neumann(g, 1e-3, a, profile, grid)
        masses.append(abs(sol.diagnostics["us_mass"]))
    slope = np.polyfit(np.log(alphas), np.log(masses), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.5)
