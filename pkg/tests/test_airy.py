import numpy as np
import pytest

mpmath = pytest.importorskip("mpmath")

from shearstab.airy import (airy_ai, airy_antiderivative,
                            airy_antiderivative_deriv,
                            airy_second_antiderivative,
                            sublayer_profile_w, sublayer_scale)

mpmath.mp.dps = 30


def _ref(z):
    return complex(mpmath.airyai(complex(z))), \
        complex(mpmath.airyai(complex(z), 1))


def test_origin_values():
    got = airy_ai(0.0)
    ai0 = 3.0 ** (-2.0 / 3.0) / float(mpmath.gamma(2.0 / 3.0))
    aip0 = -(3.0 ** (-1.0 / 3.0)) / float(mpmath.gamma(1.0 / 3.0))
    assert got.ai == pytest.approx(ai0, rel=1e-14)
    assert got.aip == pytest.approx(aip0, rel=1e-14)


def test_relative_accuracy_disk(rng):
    worst = 0.0
    for _ in range(200):
        r = rng.uniform(0.05, 50.0)
        th = rng.uniform(-np.pi, np.pi)
        z = r * np.exp(1j * th)
        got = airy_ai(z)
        ref, refp = _ref(z)
        if abs(ref) < 1e-280:
            continue
        worst = max(worst, abs(got.ai - ref) / abs(ref),
                    abs(got.aip - refp) / abs(refp))
    assert worst <= 1e-10


def _fd_second(z, h=5e-3):
    """Fourth-order central second difference of Ai."""
    vals = [airy_ai(z + k * h).ai for k in (-2, -1, 0, 1, 2)]
    return (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3]
            - vals[4]) / (12.0 * h * h)


def test_defining_ode_finite_difference():
    z0 = 1.0 + 1.0j
    assert abs(_fd_second(z0) - z0 * airy_ai(z0).ai) <= 1e-8


def test_ode_residual_random_points(rng):
    for _ in range(100):
        z = rng.uniform(0.1, 20.0) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        a0 = airy_ai(z)
        scale = max(abs(z * a0.ai), 1.0)
        assert abs(_fd_second(z) - z * a0.ai) / scale <= 1e-7


def test_taylor_consistency(rng):
    # backward Taylor step using the returned pair
    for _ in range(20):
        z = rng.uniform(0.2, 10.0) * np.exp(1j * rng.uniform(-2.0, 2.0))
        h = 1e-3
        got = airy_ai(z)
        pred = got.ai + h * got.aip + 0.5 * h * h * z * got.ai
        assert abs(airy_ai(z + h).ai - pred) <= 5e-8 * max(abs(got.ai), 1e-3)


def test_overflow_flagged():
    with pytest.raises(OverflowError):
        airy_ai(200.0 * np.exp(1j * 0.9 * np.pi))


def test_decay_sector():
    # superexponential decay along rays inside |arg z| < pi/3, weakening
    # toward the sector edge
    for th, factor in ((0.0, 1e-3), (np.pi / 6, 1e-3), (np.pi / 4, 1e-2)):
        a1 = abs(airy_ai(5.0 * np.exp(1j * th)).ai)
        a2 = abs(airy_ai(10.0 * np.exp(1j * th)).ai)
        assert a2 < a1 * factor


def test_antiderivative_derivative_identity():
    for z in (0.5, 2.0 + 0.3j, 5.0 - 0.4j):
        h = 1e-5
        fd = (airy_antiderivative(z + h)
              - airy_antiderivative(z - h)) / (2 * h)
        assert abs(fd - airy_antiderivative_deriv(z)) <= 1e-7


def test_antiderivative_decays():
    assert abs(airy_antiderivative(25.0)) <= 1e-12
    assert abs(airy_antiderivative(0.0) - 1.0 / 3.0) <= 1e-10


def test_antiderivative_ratio_lower_bound():
    # |Ai0/Ai0'| stays order one on the middle-regime argument family
    for t in (0.6, 1.0, 1.5, 2.0):
        z = np.exp(-1j * np.pi / 3.0) * t ** 2 / np.exp(1j * np.pi / 6.0)
        num = abs(airy_antiderivative(z))
        den = abs(airy_antiderivative_deriv(z))
        assert num / den >= 0.3


def test_second_antiderivative_values():
    # H(0) = -Ai'(0), H'(0) = -1/3
    aip0 = (3.0 ** (-1.0 / 3.0)) / float(mpmath.gamma(1.0 / 3.0))
    assert airy_second_antiderivative(0.0) == pytest.approx(aip0, rel=1e-9)
    h = 1e-5
    fd = (airy_second_antiderivative(h)
          - airy_second_antiderivative(-h)) / (2 * h)
    assert abs(fd + 1.0 / 3.0) <= 1e-7


def test_sublayer_profile_wall_value():
    eps = 1e-3
    alpha = 1.0 / eps ** (1.0 / 3.0)
    assert sublayer_profile_w(0.0, eps, alpha) == 1.0 + 0.0j


def test_sublayer_profile_decay():
    eps = 1e-3
    alpha = 1.0 / eps ** (1.0 / 3.0)
    val = sublayer_profile_w(5.0 * eps ** (1.0 / 3.0), eps, alpha)
    assert abs(val) < np.exp(-1.0)


def test_sublayer_profile_rate():
    eps = 1e-4
    alpha = 1.2 / eps ** (1.0 / 3.0)
    ys = np.linspace(0.0, 8.0 * eps ** (1.0 / 3.0), 24)
    vals = sublayer_profile_w(ys, eps, alpha)
    slope = np.polyfit(ys[2:], np.log(np.abs(vals[2:])), 1)[0]
    lam0 = -slope * eps ** (1.0 / 3.0)
    assert lam0 > 0.5


def test_sublayer_regime_guard():
    with pytest.raises(ValueError):
        sublayer_profile_w(0.1, 1e-3, 0.01, regime_window=(0.5, 3.0))


def test_scale_orientation():
    d = sublayer_scale(1e-3)
    assert abs(d) == pytest.approx(0.1)
    assert np.angle(d) == pytest.approx(-np.pi / 6.0)
