"""Background shear flow and the subsonic weight A = 1 - m^2 Us^2."""

from dataclasses import dataclass

import numpy as np


class ShearProfile:
    """Boundary-layer shear flow Us(Y) with analytic derivatives.

    Us must satisfy Us(0)=0, Us'(0)=1, Us>0 for Y>0, Us -> 1, with the
    weighted decay sup (1+Y)^s (|1-Us| + |Us'|+|Us''|+|Us'''|) finite.
    The subsonic weight A(Y) = 1 - m^2 Us(Y)^2 then sits in [1-m^2, 1].
    """

    def __init__(self, evaluator, mach, decay_rate=4.0, name="custom"):
        if not 0.0 < mach < 1.0:
            raise ValueError("mach must lie in (0, 1): supersonic flows are "
                             "not supported")
        if decay_rate <= 3.0:
            raise ValueError("decay_rate must exceed 3")
        self._evaluator = evaluator
        self.mach = float(mach)
        self.decay_rate = float(decay_rate)
        self.name = name

    def us(self, y, order=0):
        """Us and derivatives, order in 0..3."""
        return self._evaluator(np.asarray(y, dtype=float), order)

    def a(self, y):
        return 1.0 - self.mach ** 2 * self.us(y) ** 2

    def a_prime(self, y):
        return -2.0 * self.mach ** 2 * self.us(y) * self.us(y, 1)

    def a_second(self, y):
        u, u1, u2 = self.us(y), self.us(y, 1), self.us(y, 2)
        return -2.0 * self.mach ** 2 * (u1 ** 2 + u * u2)

    @property
    def a_inf(self):
        return 1.0 - self.mach ** 2

    # grid-sampled coefficient tables used throughout the solvers --------

    def tables(self, grid):
        """Sampled Us, Us', Us'', Us''', A, A', A'' on the grid nodes."""
        y = grid.nodes
        return {
            "us": self.us(y),
            "us1": self.us(y, 1),
            "us2": self.us(y, 2),
            "us3": self.us(y, 3),
            "a": self.a(y),
            "a1": self.a_prime(y),
            "a2": self.a_second(y),
        }


def _tanh_evaluator(y, order):
    t = np.tanh(y)
    s2 = 1.0 - t * t  # sech^2
    if order == 0:
        return t
    if order == 1:
        return s2
    if order == 2:
        return -2.0 * t * s2
    if order == 3:
        return -2.0 * s2 * s2 + 4.0 * t * t * s2
    raise ValueError("derivative order must be 0..3")


def make_default_profile(mach, decay_rate=4.0):
    """The built-in tanh profile; derivatives are exact closed forms."""
    return ShearProfile(_tanh_evaluator, mach, decay_rate, name="tanh")


def make_profile(name, mach, decay_rate=4.0):
    if name != "tanh":
        raise ValueError(f"unknown profile {name!r}; built-in profiles: tanh")
    return make_default_profile(mach, decay_rate)


@dataclass
class ConditionReport:
    """Outcome of the structural-condition check on a grid."""

    weighted_sup: float
    min_a: float
    max_a: float
    wall_value: float
    wall_slope_error: float
    monotone: bool
    positive: bool
    violations: list

    @property
    def passed(self):
        return not self.violations


def check_structural_conditions(profile, grid, tol=1e-10, sup_bound=1e3):
    """Verify the wall conditions, monotone approach to 1, weighted decay
    and the subsonic bounds on A, sampled on the grid up to Y_max."""
    y = grid.nodes
    u = profile.us(y)
    derivs = [profile.us(y, k) for k in (1, 2, 3)]
    a = profile.a(y)

    weight = (1.0 + y) ** profile.decay_rate
    quantity = np.abs(1.0 - u) + sum(np.abs(d) for d in derivs)
    weighted_sup = float(np.max(weight * quantity))

    wall_value = float(abs(u[0]))
    wall_slope_error = float(abs(derivs[0][0] - 1.0))
    positive = bool(np.all(u[1:] > 0.0))
    monotone = bool(np.all(np.diff(u) > -tol))

    violations = []
    if wall_value > tol:
        violations.append("Us(0) != 0")
    if wall_slope_error > tol:
        violations.append("dY Us(0) != 1")
    if not positive:
        violations.append("Us not positive for Y > 0")
    if not monotone:
        violations.append("Us not monotone on the grid")
    if not np.isfinite(weighted_sup) or weighted_sup > sup_bound:
        violations.append("weighted decay sup too large")
    lo, hi = 1.0 - profile.mach ** 2, 1.0
    if np.min(a) < lo - tol or np.max(a) > hi + tol:
        violations.append("A outside [1-m^2, 1]")

    return ConditionReport(
        weighted_sup=weighted_sup,
        min_a=float(np.min(a)),
        max_a=float(np.max(a)),
        wall_value=wall_value,
        wall_slope_error=wall_slope_error,
        monotone=monotone,
        positive=positive,
        violations=violations,
    )
