"""Complex Airy function, its ray antiderivative, and the sublayer profile.

Evaluation strategy: Maclaurin series inside |z| <= 4, the large-z
asymptotic expansion outside |z| >= 9 (with the rotation identity off the
principal sector), and high-order Taylor continuation of the defining ODE
across the annulus in between.  Continuation runs inward on the recessive
sector |arg z| <= pi/3 and outward elsewhere, which keeps the spurious
second solution suppressed in both cases.
"""

import functools
from dataclasses import dataclass

import numpy as np

_SERIES_RADIUS = 4.0
_ASYMPT_RADIUS = 9.0
_AI0 = 0.3550280538878172392600631860041831763980  # Ai(0)
_AIP0 = -0.2588194037928067984051835601892039634793  # Ai'(0)
_TWO_SQRT_PI = 2.0 * np.sqrt(np.pi)


@dataclass
class AiryValue:
    z: complex
    ai: complex
    aip: complex


def _series(z):
    """Maclaurin series of Ai, Ai'; accurate for |z| <= ~5."""
    z = complex(z)
    z3 = z ** 3
    f, g = 1.0 + 0j, z
    df, dg = 0.0 + 0j, 1.0 + 0j
    a, b = 1.0 + 0j, z
    for k in range(1, 80):
        a *= z3 / ((3 * k) * (3 * k - 1))
        b *= z3 / ((3 * k + 1) * (3 * k))
        f += a
        g += b
        if z != 0:
            df += 3 * k * a / z
            dg += (3 * k + 1) * b / z
        if abs(a) + abs(b) < 1e-20 * (abs(f) + abs(g) + 1e-30):
            break
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * df + _AIP0 * dg
    return ai, aip


def _asymptotic(z):
    """Large-z expansion, |arg z| <= 2*pi/3 assumed."""
    z = complex(z)
    sqz = np.sqrt(z)
    zeta = 2.0 / 3.0 * z * sqz
    if zeta.real > 700.0:
        # e^{-zeta} underflows; the function is zero to double precision
        return 0.0 + 0j, 0.0 + 0j
    if zeta.real < -700.0:
        raise OverflowError("Airy evaluation overflows: Re((2/3)z^(3/2)) "
                            f"= {zeta.real:.1f}")
    su, sv = 1.0 + 0j, 1.0 + 0j
    u = 1.0
    sign = 1.0
    zk = 1.0 + 0j
    prev = np.inf
    for k in range(1, 60):
        u *= (6 * k - 5) * (6 * k - 1) / (72.0 * k)
        v = u * (6 * k + 1) / (1.0 - 6 * k)
        sign = -sign
        zk /= zeta
        tu = sign * u * zk
        tv = sign * v * zk
        mag = abs(tu)
        if mag > prev:  # past the smallest term: stop
            break
        su += tu
        sv += tv
        prev = mag
        if mag < 1e-19:
            break
    pref = np.exp(-zeta) / (_TWO_SQRT_PI * z ** 0.25)
    ai = pref * su
    aip = -np.exp(-zeta) * z ** 0.25 / _TWO_SQRT_PI * sv
    return ai, aip


def _taylor_march(z0, ai0, aip0, z1, max_step=0.35, terms=26):
    """Continue (Ai, Ai') from z0 to z1 along the straight segment."""
    direction = z1 - z0
    dist = abs(direction)
    if dist == 0.0:
        return ai0, aip0
    e = direction / dist
    nsteps = max(1, int(np.ceil(dist / max_step)))
    h = dist / nsteps
    z = z0
    ai, aip = ai0, aip0
    e2 = e * e
    for _ in range(nsteps):
        coef = np.empty(terms + 2, dtype=complex)
        coef[0] = ai
        coef[1] = e * aip
        for k in range(terms):
            low = coef[k - 1] if k >= 1 else 0.0
            coef[k + 2] = e2 * (z * coef[k] + e * low) / ((k + 1) * (k + 2))
        ai = 0.0 + 0j
        daidt = 0.0 + 0j
        hp = 1.0
        for k in range(terms + 2):
            ai += coef[k] * hp
            if k + 1 <= terms + 1:
                daidt += (k + 1) * coef[k + 1] * hp
            hp *= h
        aip = daidt / e
        z = z + h * e
    return ai, aip


def _march_value(z):
    theta = np.angle(z)
    if abs(theta) <= np.pi / 3.0:
        # recessive sector: march inward from the asymptotic zone
        z0 = (_ASYMPT_RADIUS + 0.5) * np.exp(1j * theta)
        ai0, aip0 = _asymptotic(z0)
    else:
        # dominant sector: march outward from the series zone
        z0 = (_SERIES_RADIUS - 0.1) * np.exp(1j * theta)
        ai0, aip0 = _series(z0)
    return _taylor_march(z0, ai0, aip0, complex(z))


def airy_ai(z):
    """Ai(z) and Ai'(z) for complex z.

    Raises OverflowError when the result exceeds the double range (deep in
    the growing sector); underflow in the decaying sector returns zeros.
    """
    z = complex(z)
    r = abs(z)
    if r <= _SERIES_RADIUS:
        ai, aip = _series(z)
    elif r >= _ASYMPT_RADIUS:
        if abs(np.angle(z)) <= 2.0 * np.pi / 3.0:
            ai, aip = _asymptotic(z)
        else:
            # rotate onto the principal sector
            w = np.exp(2j * np.pi / 3.0)
            a1, p1 = _asymptotic(z * w)
            a2, p2 = _asymptotic(z / w)
            ai = -w * a1 - a2 / w
            aip = -w * w * p1 - p2 / (w * w)
    else:
        ai, aip = _march_value(z)
    return AiryValue(z, ai, aip)


def ai(z):
    return airy_ai(z).ai


@functools.lru_cache(maxsize=100000)
def airy_antiderivative(z):
    """Ai0(z) = integral of Ai from e^{i pi/6} z to infinity along the ray
    of decay; the path runs parallel to the positive real axis."""
    start = np.exp(1j * np.pi / 6.0) * complex(z)
    # panel quadrature until the integrand is negligible
    nodes, wts = np.polynomial.legendre.leggauss(24)
    total = 0.0 + 0j
    t0 = 0.0
    width = 1.0
    for _ in range(200):
        t1 = t0 + width
        mid, half = 0.5 * (t0 + t1), 0.5 * width
        pts = start + mid + half * nodes
        vals = np.array([airy_ai(p).ai for p in pts])
        total += half * np.dot(wts, vals)
        zeta_end = (2.0 / 3.0) * (start + t1) ** 1.5
        if zeta_end.real > 45.0:
            break
        t0 = t1
    else:
        raise RuntimeError("antiderivative contour did not converge")
    return total


def airy_antiderivative_deriv(z):
    """d/dz Ai0(z) = -e^{i pi/6} Ai(e^{i pi/6} z)."""
    rot = np.exp(1j * np.pi / 6.0)
    return -rot * airy_ai(rot * complex(z)).ai


@functools.lru_cache(maxsize=100000)
def airy_second_antiderivative(z):
    """H(z) = int_z^inf (s - z) Ai(s) ds along a path parallel to the
    positive real axis; H'' = Ai, H(0) = -Ai'(0), H'(0) = -1/3.

    This is the decaying sublayer shape entering the low-frequency fast
    mode.  Valid in the decay sector |arg z| < pi/3.
    """
    z = complex(z)
    nodes, wts = np.polynomial.legendre.leggauss(24)
    total = 0.0 + 0j
    t0 = 0.0
    width = 1.0
    for _ in range(200):
        t1 = t0 + width
        mid, half = 0.5 * (t0 + t1), 0.5 * width
        ts = mid + half * nodes
        vals = np.array([t * airy_ai(z + t).ai for t in ts])
        total += half * np.dot(wts, vals)
        zeta_end = (2.0 / 3.0) * (z + t1) ** 1.5
        if zeta_end.real > 45.0:
            break
        t0 = t1
    else:
        raise RuntimeError("second antiderivative contour did not converge")
    return total


def sublayer_scale(eps):
    """delta = e^{-i pi/6} eps^{1/3}, the Airy sublayer width."""
    return np.exp(-1j * np.pi / 6.0) * eps ** (1.0 / 3.0)


def sublayer_profile_w(y, eps, alpha, regime_window=(0.05, 4.0)):
    """W(Y) = Ai(delta^-1 (Y+Y0)) / Ai(delta^-1 Y0) with Y0 = -i eps alpha^2.

    W(0) = 1 exactly; |W| decays like exp(-lambda0 Y / eps^(1/3)).
    """
    t = alpha * eps ** (1.0 / 3.0)
    lo, hi = regime_window
    if not lo <= t <= hi:
        raise ValueError(f"alpha*eps^(1/3) = {t:.3g} outside the middle-"
                         f"frequency window [{lo}, {hi}]")
    delta = sublayer_scale(eps)
    y0 = -1j * eps * alpha ** 2
    denom = airy_ai(y0 / delta).ai
    if abs(denom) < 1e-250:
        raise ZeroDivisionError("Airy denominator vanished; the profile "
                                "argument hit the negative real axis")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    vals = np.array([airy_ai((yy + y0) / delta).ai for yy in y]) / denom
    return vals if vals.size > 1 else vals[0]
