import numpy as np
import pytest

from shearstab.grid import build_grid
from shearstab.operators import ModeOperators, relative_residual
from shearstab.orr_sommerfeld import (
    solve_os_symmetrized, dense_os_symmetrized, solve_os_sym_deriv,
    os_remainder_series, solve_os_full, solve_os_high_freq, slow_mode,
    fast_mode)
from shearstab.profiles import make_default_profile
from shearstab.data import random_decaying_field

GAMMA_THIRD = 2.678938534707747633   # Gamma(1/3)
TRACE_CONST = 3.0 ** (-2.0 / 3.0) * GAMMA_THIRD


def test_zero_source(grid, profile):
    sol = solve_os_symmetrized(np.zeros(grid.n), 1e-3, 1.0, profile, grid)
    assert np.abs(sol.phi).max() == 0.0
    assert sol.iterations == 0


def test_iteration_matches_dense_oracle(grid, profile, rng):
    eps, alpha = 1e-3, 1.0
    ops = ModeOperators(grid, profile, alpha, eps)
    f = random_decaying_field(rng, grid)
    it = solve_os_symmetrized(f, eps, alpha, profile, grid, ops=ops)
    de = dense_os_symmetrized(f, eps, alpha, profile, grid, ops=ops,
                              wall_slope=it.wall_slope)
    diff = grid.norm_l2(it.phi - de.phi) / grid.norm_l2(de.phi)
    assert diff <= 1e-6
    assert it.residual <= 1e-6
    # increments contract at the cube-root-of-eps scale
    assert it.history[1] / it.history[0] <= 10.0 * eps ** (1.0 / 3.0)
    # strictly decreasing increments
    assert all(b < a for a, b in zip(it.history, it.history[1:]))


def test_preserved_extra_wall_condition(grid, profile, rng):
    """The iteration preserves dY(Lam phi)(0)=0 up to the rounding floor of
    the discrete third derivative at the wall."""
    eps, alpha = 1e-3, 1.0
    ops = ModeOperators(grid, profile, alpha, eps)
    f = random_decaying_field(rng, grid)
    it = solve_os_symmetrized(f, eps, alpha, profile, grid, ops=ops)
    h0 = grid.nodes[1] - grid.nodes[0]
    floor = 1e-16 / h0 ** 3 * np.abs(it.phi).max()
    scale = grid.norm_l2(grid.d1 @ (ops.lam @ it.phi))
    assert abs((grid.d1 @ (ops.lam @ it.phi))[0]) <= \
        100.0 * floor + 1e-8 * scale


def test_eps_sweep_delta_alpha_envelope(grid, profile, rng):
    """||Delta_a phi|| grows no faster than eps^(-1/3) for wall-vanishing
    sources."""
    f = random_decaying_field(rng, grid)
    eps_values = np.array([1e-2, 3e-3, 1e-3, 3e-4])
    vals = []
    for eps in eps_values:
        ops = ModeOperators(grid, profile, 1.0, eps)
        sol = solve_os_symmetrized(f, eps, 1.0, profile, grid, ops=ops)
        vals.append(grid.norm_l2(ops.delta_alpha @ sol.phi))
    slope = np.polyfit(np.log(eps_values), np.log(vals), 1)[0]
    assert slope >= -1.0 / 3.0 - 0.15


def test_remainder_series_vanishes_incompressible(grid, rng):
    """As m -> 0 the weight A flattens and the commutator source dies
    like m^2, so the remainder series collapses."""
    eps, alpha = 1e-3, 1.0
    profile = make_default_profile(1e-4)
    ops = ModeOperators(grid, profile, alpha, eps)
    f = random_decaying_field(rng, grid)
    sym = solve_os_symmetrized(f, eps, alpha, profile, grid, ops=ops)
    phi_r, _ = os_remainder_series(sym.phi, eps, alpha, profile, grid,
                                   ops=ops)
    assert grid.norm_l2(phi_r) <= 1e-6 * grid.norm_l2(sym.phi)


def test_commutator_remainder(grid, profile, rng):
    eps, alpha = 1e-3, 1.0
    ops = ModeOperators(grid, profile, alpha, eps)
    f = random_decaying_field(rng, grid)
    sym = solve_os_symmetrized(f, eps, alpha, profile, grid, ops=ops)
    phi_r, hist = os_remainder_series(sym.phi, eps, alpha, profile, grid,
                                      ops=ops)
    # full-operator residual of the corrected sum
    res = relative_residual(ops.os_full, sym.phi + phi_r, f, grid,
                            (0, 1, grid.n - 2, grid.n - 1))
    assert res <= 1e-8
    # eps halved shrinks the remainder by about 2^(-2/3)
    eps2 = eps / 2.0
    ops2 = ModeOperators(grid, profile, alpha, eps2)
    sym2 = solve_os_symmetrized(f, eps2, alpha, profile, grid, ops=ops2)
    phi_r2, _ = os_remainder_series(sym2.phi, eps2, alpha, profile, grid,
                                    ops=ops2)
    ratio = (np.hypot(grid.norm_l2(grid.d1 @ phi_r2),
                      alpha * grid.norm_l2(phi_r2))
             / np.hypot(grid.norm_l2(grid.d1 @ phi_r),
                        alpha * grid.norm_l2(phi_r)))
    assert 0.3 <= ratio <= 0.9     # ideal 2^(-2/3) ~ 0.63


def test_high_freq_zero(grid, profile):
    eps = 1e-4
    alpha = 3.0 / eps ** (1.0 / 3.0)
    sol = solve_os_high_freq(np.zeros(grid.n), eps, alpha, profile, grid)
    assert np.abs(sol.phi).max() == 0.0


def test_high_freq_alpha_decay(grid, profile, rng):
    """Doubling alpha at fixed eps shrinks the solution about eightfold
    once tangential diffusion dominates (alpha well past eps^(-1/2))."""
    eps = 1e-4
    f = random_decaying_field(rng, grid, wall_zero=False)
    n1 = []
    for alpha in (200.0, 400.0):
        sol = solve_os_high_freq(f, eps, alpha, profile, grid)
        n1.append(np.hypot(grid.norm_l2(grid.d1 @ sol.phi),
                           alpha * grid.norm_l2(sol.phi)))
    exponent = np.log2(n1[0] / n1[1])
    assert exponent == pytest.approx(3.0, abs=0.3)


def test_high_freq_regime_guard(grid, profile):
    with pytest.raises(ValueError):
        solve_os_high_freq(np.zeros(grid.n), 1e-3, 1.0, profile, grid)


def test_high_freq_refined_grid_oracle(profile):
    """The direct solve agrees with an independent discretization."""
    eps = 1e-4
    alpha = 3.0 / eps ** (1.0 / 3.0)
    g1 = build_grid(192, 30.0, "stretched")
    g2 = build_grid(384, 30.0, "stretched")
    f1 = g1.nodes * np.exp(-g1.nodes) * (1.0 + 0.5j)
    f2 = g2.nodes * np.exp(-g2.nodes) * (1.0 + 0.5j)
    s1 = solve_os_high_freq(f1, eps, alpha, profile, g1)
    s2 = solve_os_high_freq(f2, eps, alpha, profile, g2)
    interp = g1.interpolate(s1.phi, g2.nodes)
    diff = g2.norm_l2(interp - s2.phi) / g2.norm_l2(s2.phi)
    assert diff <= 1e-8


def test_slow_mode_traces(grid, profile):
    # large alpha: wall slope approaches -alpha
    eps, alpha = 1e-4, 4.0
    sol = slow_mode(eps, alpha, profile, grid)
    assert sol.wall_value == pytest.approx(1.0, abs=1e-10)
    assert sol.residual <= 1e-8
    corr = abs(sol.wall_slope - (-alpha)) / eps ** (-1.0 / 6.0)
    assert corr <= 2.0      # O(1) constant on the eps^(-1/6) correction


def test_slow_mode_small_alpha_trace():
    grid = build_grid(256, 120.0, "stretched", stretch=5.0)
    profile = make_default_profile(0.5)
    eps, alpha = 1e-5, 0.2
    sol = slow_mode(eps, alpha, profile, grid)
    assert sol.residual <= 1e-8
    predicted = sol.predicted_slope    # c_E/alpha from the Rayleigh fit
    assert abs(sol.wall_slope - predicted) <= 0.5 * abs(predicted)


def test_fast_mode_high_regime(grid, profile):
    eps = 1e-4
    alpha = 3.0 / eps ** (1.0 / 3.0)
    sol = fast_mode(eps, alpha, "high", profile, grid)
    # leading profile wall slope is exactly 1/(2 alpha)
    y = grid.nodes
    app = y * np.exp(-alpha * y) / (2.0 * alpha)
    assert (grid.d1[0] @ app) == pytest.approx(1.0 / (2.0 * alpha),
                                               rel=1e-10)
    assert abs(sol.wall_slope) >= 1.0 / (4.0 * alpha)
    assert abs(sol.wall_value) <= 1e-10
    assert sol.residual <= 1e-8


def test_fast_mode_low_trace_constant(grid, profile):
    """|dY phi(0)| * eps^(1/3) approaches 3^(-2/3) Gamma(1/3)."""
    alpha = 0.5
    for eps in (1e-3, 1e-4, 1e-5):
        sol = fast_mode(eps, alpha, "low", profile, grid)
        assert sol.wall_value == pytest.approx(1.0, abs=1e-9)
        scaled = abs(sol.wall_slope) * eps ** (1.0 / 3.0)
        assert scaled == pytest.approx(TRACE_CONST, rel=0.1)
        assert sol.residual <= 1e-7


def test_fast_mode_middle(grid, profile):
    eps = 1e-4
    alpha = 1.2 / eps ** (1.0 / 3.0)
    sol = fast_mode(eps, alpha, "middle", profile, grid)
    assert abs(sol.wall_value) <= 1e-10
    assert abs(sol.wall_slope) >= 0.1 * eps ** (1.0 / 3.0)
    assert sol.residual <= 1e-8


def test_fast_mode_regime_guards(grid, profile):
    with pytest.raises(ValueError):
        fast_mode(1e-4, 3.0 / 1e-4 ** (1 / 3), "low", profile, grid)
    with pytest.raises(ValueError):
        fast_mode(1e-3, 0.1, "high", profile, grid)
    with pytest.raises(ValueError):
        fast_mode(1e-3, 0.1, "sideways", profile, grid)


def test_deriv_source_route(grid, profile, rng):
    """Sources with nonzero wall values go through the clamped auxiliary
    solve; the result still satisfies the symmetrized equation."""
    eps, alpha = 1e-3, 1.0
    ops = ModeOperators(grid, profile, alpha, eps)
    f = random_decaying_field(rng, grid, wall_zero=False)
    sol = solve_os_sym_deriv(f, eps, alpha, profile, grid, ops=ops)
    assert sol.residual <= 1e-8
    assert abs(sol.phi[0]) <= 1e-10


def test_regime_overlap_consistency(grid, profile, rng):
    """Iteration-route and direct high-frequency solves of the full
    operator agree near the regime boundary, up to the one-dimensional
    homogeneous freedom pinned by the wall slope."""
    eps = 1e-4
    alpha = 2.2 / eps ** (1.0 / 3.0)
    ops = ModeOperators(grid, profile, alpha, eps)
    f = random_decaying_field(rng, grid)
    it = solve_os_full(f, eps, alpha, profile, grid, ops=ops)
    hi = solve_os_high_freq(f, eps, alpha, profile, grid, ops=ops,
                            threshold=2.0)
    fm = fast_mode(eps, alpha, "middle", profile, grid, ops=ops,
                   thresholds={"c1": 0.5, "c2": 3.0})
    kappa = (it.wall_slope - hi.wall_slope) / fm.wall_slope
    diff = grid.norm_l2(it.phi - hi.phi - kappa * fm.phi) \
        / grid.norm_l2(hi.phi)
    assert diff <= 0.05
