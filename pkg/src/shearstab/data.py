"""Built-in data families: forces, random smooth fields, spectral helpers."""

from dataclasses import dataclass, field

import numpy as np


def random_decaying_field(rng, grid, wall_zero=True, width=None):
    """Random smooth complex field with exponential decay.

    wall_zero fields vanish at Y=0 (square-integrable after division by the
    shear profile)."""
    y = grid.nodes
    q = width if width is not None else rng.uniform(0.6, 1.4)
    c = rng.normal(size=4) + 1j * rng.normal(size=4)
    f = (c[0] * y + c[1] * y ** 2 + c[2] * y * np.sin(y)
         + c[3] * y ** 3 * np.exp(-0.3 * y)) * np.exp(-q * y)
    if not wall_zero:
        f = f + (rng.normal() + 1j * rng.normal()) * np.exp(-q * y)
    return f


def profile_family(name, grid, center=2.0, width=1.0):
    """Named Y-profiles for forcing data."""
    y = grid.nodes
    if name == "gaussian-bump":
        return np.exp(-((y - center) / width) ** 2)
    if name == "exp-decay":
        return y * np.exp(-y / width)
    raise ValueError(f"unknown profile family {name!r}; "
                     "use gaussian-bump or exp-decay")


@dataclass
class ExternalForce:
    """Perturbation force as a finite Fourier sum with Y-profiles.

    modes: n -> (f1_n, f2_n) grid arrays; must have no zero mode.  Real
    physical forces carry Hermitian pairs (f_{-n} = conj(f_n)).
    """

    modes: dict
    torus_len: float

    def __post_init__(self):
        if 0 in self.modes:
            f1, f2 = self.modes[0]
            if np.abs(f1).max() > 0 or np.abs(f2).max() > 0:
                raise ValueError("external force must have no zero mode")
            del self.modes[0]

    def component_modes(self, k):
        return {n: pair[k] for n, pair in self.modes.items()}

    def norm_w(self, nu, s, grid):
        """Weighted data norm: (1+y)^s weight on the force plus scaled
        first and second gradients."""
        from .linear_solver import sobolev_mode_norm
        sq = np.sqrt(nu)
        area = 2.0 * np.pi * self.torus_len
        wgt = (1.0 + sq * grid.nodes) ** s
        base = 0.0
        for f1, f2 in self.modes.values():
            base += area * sq * (grid.norm_l2(wgt * f1) ** 2
                                 + grid.norm_l2(wgt * f2) ** 2)
        g1 = np.hypot(
            sobolev_mode_norm(self.component_modes(0), 1, nu,
                              self.torus_len, grid),
            sobolev_mode_norm(self.component_modes(1), 1, nu,
                              self.torus_len, grid))
        g2 = np.hypot(
            sobolev_mode_norm(self.component_modes(0), 2, nu,
                              self.torus_len, grid),
            sobolev_mode_norm(self.component_modes(1), 2, nu,
                              self.torus_len, grid))
        return (float(np.sqrt(base)) + nu ** (13.0 / 8.0) * g1
                + nu ** (21.0 / 8.0) * g2)

    @classmethod
    def from_family(cls, family, grid, torus_len, amplitude=1e-4,
                    mode_numbers=(1,), center=2.0, width=1.0):
        prof = amplitude * profile_family(family, grid, center, width)
        modes = {}
        for n in mode_numbers:
            if n == 0:
                raise ValueError("forcing mode numbers must be nonzero")
            modes[n] = (prof.astype(complex), 0.5 * prof.astype(complex))
            modes[-n] = (np.conj(modes[n][0]), np.conj(modes[n][1]))
        return cls(modes=modes, torus_len=torus_len)


# ---------------------------------------------------------------------------
# Fourier transform helpers between mode dicts and x-samples


def modes_to_physical(modes, n_points, grid):
    """Samples on the uniform x-grid (rows) times Y-nodes (columns)."""
    coef = np.zeros((n_points, grid.n), dtype=complex)
    for n, vals in modes.items():
        coef[n % n_points] += np.asarray(vals, dtype=complex)
    return np.fft.ifft(coef, axis=0) * n_points


def physical_to_modes(values, n_max):
    """Mode dict (|n| <= n_max) of x-samples (rows are x-points)."""
    m = values.shape[0]
    coef = np.fft.fft(values, axis=0) / m
    out = {}
    for n in range(-n_max, n_max + 1):
        out[n] = coef[n % m].copy()
    return out
