import numpy as np
import pytest

from shearstab.grid import build_grid, ComplexField

TOL_QUAD = 1e-8
TOL_IBP = 1e-7


def test_uniform_derivative_of_constant():
    g = build_grid(64, 20.0, "uniform")
    assert g.n == 64
    assert np.abs(g.d1 @ np.ones(64)).max() <= 1e-10


def test_derivative_of_identity():
    for mapping in ("uniform", "stretched"):
        g = build_grid(200, 30.0, mapping)
        tol = 1e-8 * g.n
        assert np.abs(g.d1 @ g.nodes - 1.0).max() <= tol


def test_stretched_clusters_near_wall():
    g = build_grid(128, 30.0, "stretched")
    assert g.nodes[1] - g.nodes[0] < g.nodes[-1] - g.nodes[-2]
    gu = build_grid(128, 30.0, "uniform")
    # the unstretched map is symmetric about the midpoint
    assert gu.nodes[1] - gu.nodes[0] == pytest.approx(
        gu.nodes[-1] - gu.nodes[-2], rel=1e-12)


def test_quadrature_exponential():
    g = build_grid(96, 30.0, "stretched")
    exact = 1.0 - np.exp(-30.0)
    assert abs(g.integrate(np.exp(-g.nodes)) - exact) <= TOL_QUAD


def test_derivative_exponential():
    for mapping in ("uniform", "stretched"):
        g = build_grid(200, 30.0, mapping)
        f = np.exp(-g.nodes)
        assert np.abs(g.d1 @ f + f).max() <= 1e-8 * g.n


def test_delta_alpha_kernel(grid):
    alpha = 0.7
    f = np.exp(-alpha * grid.nodes)
    res = grid.d2 @ f - alpha ** 2 * f
    assert np.abs(res).max() <= 1e-7


def test_zero_field_derivative(grid):
    assert np.abs(grid.d1 @ np.zeros(grid.n)).max() == 0.0


def test_rejects_small_grids():
    with pytest.raises(ValueError):
        build_grid(8, 30.0)
    with pytest.raises(ValueError):
        build_grid(64, 5.0)
    with pytest.raises(ValueError):
        build_grid(64, 30.0, mapping="log")


def test_integration_by_parts(grid, rng):
    from shearstab.norms import ibp_defect
    for _ in range(5):
        q1, q2 = rng.uniform(0.5, 1.5, size=2)
        f = np.exp(-q1 * grid.nodes) * np.sin(grid.nodes)
        g2 = np.exp(-q2 * grid.nodes) * grid.nodes
        assert ibp_defect(f, g2, grid) <= TOL_IBP


def test_antiderivatives(grid):
    f = np.exp(-grid.nodes)
    left = grid.antiderivative(f, from_left=True)
    assert np.abs(left - (1.0 - np.exp(-grid.nodes))).max() <= 1e-12
    right = grid.antiderivative(f, from_left=False)
    exact = -(np.exp(-grid.nodes) - np.exp(-30.0))
    assert np.abs(right - exact).max() <= 1e-12


def test_interpolation(grid):
    f = np.exp(-grid.nodes) * np.cos(grid.nodes)
    pts = np.array([0.123, 1.414, 7.5, 22.0])
    exact = np.exp(-pts) * np.cos(pts)
    assert np.abs(grid.interpolate(f, pts) - exact).max() <= 1e-10


def test_complex_field_validation(grid):
    ComplexField(np.zeros(grid.n), grid)
    with pytest.raises(ValueError):
        ComplexField(np.zeros(grid.n - 1), grid)
    bad = np.zeros(grid.n)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        ComplexField(bad, grid)


def test_from_callable(grid):
    f = ComplexField.from_callable(lambda y: np.exp(-y), grid)
    assert len(f) == grid.n
    assert f.values[0] == pytest.approx(1.0)
