import numpy as np
import pytest

from shearstab.profiles import (ShearProfile, make_default_profile,
                                make_profile, check_structural_conditions)


def test_wall_values():
    p = make_default_profile(0.5)
    assert p.us(0.0) == 0.0
    assert p.us(0.0, 1) == 1.0
    assert p.a(0.0) == 1.0


def test_far_field_weight_limit(grid):
    p = make_default_profile(0.5)
    # A -> 1 - m^2 at the top of the domain
    assert p.a(grid.nodes[-1]) == pytest.approx(0.75, abs=1e-12)
    assert p.a_inf == 0.75


def test_closed_form_point():
    p = make_default_profile(0.9)
    t = np.tanh(1.0)
    assert p.us(1.0) == pytest.approx(t)
    assert p.a(1.0) == pytest.approx(1.0 - 0.81 * t * t)


def test_rejects_bad_mach():
    for m in (-0.1, 0.0, 1.0, 1.2):
        with pytest.raises(ValueError):
            make_default_profile(m)


def test_derivatives_consistent():
    p = make_default_profile(0.5)
    y = np.linspace(0.0, 10.0, 200)
    h = 1e-5
    for k in (0, 1, 2):
        fd = (p.us(y + h, k) - p.us(y - h, k)) / (2 * h)
        assert np.abs(fd - p.us(y, k + 1)).max() < 1e-8


def test_structural_check_passes(grid):
    p = make_default_profile(0.5)
    rep = check_structural_conditions(p, grid)
    assert rep.passed
    assert np.isfinite(rep.weighted_sup)
    assert rep.min_a >= 1.0 - 0.25 - 1e-12


def test_structural_check_flags_bad_slope(grid):
    def bad(y, order):
        base = make_default_profile(0.5)
        return 2.0 * base.us(y, order) if order <= 3 else None

    p = ShearProfile(bad, 0.5)
    rep = check_structural_conditions(p, grid)
    assert not rep.passed
    assert any("dY Us(0)" in v for v in rep.violations)


def test_min_a_close_to_sonic(grid):
    p = make_default_profile(0.99)
    rep = check_structural_conditions(p, grid)
    assert 1.0 - 0.99 ** 2 - 1e-12 <= rep.min_a <= 1.0


def test_subsonic_weight_identities(grid):
    p = make_default_profile(0.7)
    y = grid.nodes
    a = p.a(y)
    m2 = 0.49
    assert np.all(a >= 1.0 - m2 - 1e-14)
    assert np.all(a <= 1.0 + 1e-14)
    lhs = np.abs(p.a_prime(y))
    rhs = 2.0 * m2 * np.abs(p.us(y)) * np.abs(p.us(y, 1))
    assert np.abs(lhs - rhs).max() <= 1e-13
    # |1 - 1/A| <= m^2/(1-m^2) * Us^2 pointwise
    bound = m2 / (1.0 - m2) * p.us(y) ** 2
    assert np.all(np.abs(1.0 - 1.0 / a) <= bound + 1e-14)


def test_named_profile_lookup():
    assert make_profile("tanh", 0.5).name == "tanh"
    with pytest.raises(ValueError):
        make_profile("blasius", 0.5)
