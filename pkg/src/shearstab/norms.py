"""Norms of grid fields: plain, Sobolev and weighted variants."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class NormReport:
    """Norm entries of a single complex field.

    weighted[(j, k)] holds ||Y^k dY^j f||_L2 for j, k <= 3.  The sqrt(Us)-
    and Us-weighted entries are filled only when a profile is supplied.
    """

    l2: float
    l1: float
    linf: float
    h1: float
    h2: float
    h1_alpha: float
    weighted: dict = field(default_factory=dict)
    sqrt_us_l2: float = None
    us_l2: float = None

    def as_row(self):
        row = {
            "l2": self.l2, "l1": self.l1, "linf": self.linf,
            "h1": self.h1, "h2": self.h2, "h1_alpha": self.h1_alpha,
        }
        for (j, k), v in sorted(self.weighted.items()):
            row[f"w_d{j}_y{k}"] = v
        if self.sqrt_us_l2 is not None:
            row["sqrt_us_l2"] = self.sqrt_us_l2
            row["us_l2"] = self.us_l2
        return row


def compute_norms(f, alpha, grid=None, profile=None, max_weight=3):
    """NormReport of a field; all integrals use the grid quadrature.

    h1/h2 are seminorms ||dY f|| and ||dY^2 f||; h1_alpha is the anisotropic
    combination ||(dY f, alpha f)||.
    """
    if grid is None:
        grid = f.grid
        f = f.values
    f = np.asarray(f, dtype=complex)
    d = [f, grid.d1 @ f, grid.d2 @ f, grid.d3 @ f]

    l2 = grid.norm_l2(f)
    report = NormReport(
        l2=l2,
        l1=grid.norm_l1(f),
        linf=float(np.abs(f).max()),
        h1=grid.norm_l2(d[1]),
        h2=grid.norm_l2(d[2]),
        h1_alpha=float(np.hypot(grid.norm_l2(d[1]), abs(alpha) * l2)),
    )
    y = grid.nodes
    for j in range(max_weight + 1):
        for k in range(max_weight + 1):
            report.weighted[(j, k)] = grid.norm_l2(y ** k * d[j])
    if profile is not None:
        us = profile.us(y)
        report.sqrt_us_l2 = grid.norm_l2(np.sqrt(us) * f)
        report.us_l2 = grid.norm_l2(us * f)
    return report


def ibp_defect(f, g, grid):
    """|<f', g> + <f, g'> - [fg]| : discrete integration-by-parts defect."""
    fv = np.asarray(f, dtype=complex)
    gv = np.asarray(g, dtype=complex)
    lhs = grid.integrate((grid.d1 @ fv) * gv) + grid.integrate(fv * (grid.d1 @ gv))
    boundary = fv[-1] * gv[-1] - fv[0] * gv[0]
    return abs(lhs - boundary)


# ---------------------------------------------------------------------------
# two-dimensional helpers on the Fourier-in-x representation
#
# A 2-D field on the torus of length 2*pi*L times the half line is stored as
# a dict {n: values on the grid}; mode 0 is the x-average.


def linf_2d(modes, grid):
    """sup norm of sum_n f_n(Y) e^{i n x / L}, bounded by sum of |f_n|."""
    total = np.zeros(grid.n)
    for vals in modes.values():
        total = total + np.abs(np.asarray(vals))
    return float(total.max())


def linf_bound_parts(modes, grid, torus_len, beta=0.5):
    """The two ingredients of the zero/nonzero-mode sup-norm inequality:

    returns (||f0||_inf, ||dY f_ne||_L2, ||dx^(1+beta) f_ne||_L2) so that
    ||f||_inf <= ||f0||_inf + C * sqrt(||dY f_ne|| * ||dx^(1+beta) f_ne||).
    """
    f0 = np.abs(np.asarray(modes.get(0, np.zeros(grid.n)))).max()
    dy_sq = 0.0
    dx_sq = 0.0
    area = 2.0 * np.pi * torus_len
    for n, vals in modes.items():
        if n == 0:
            continue
        vals = np.asarray(vals, dtype=complex)
        khat = n / torus_len
        dy_sq += area * grid.norm_l2(grid.d1 @ vals) ** 2
        dx_sq += area * abs(khat) ** (2 * (1 + beta)) * grid.norm_l2(vals) ** 2
    return float(f0), float(np.sqrt(dy_sq)), float(np.sqrt(dx_sq))


def zero_mode_product(modes_f, modes_g, grid):
    """x-average of the product of two mode dicts: sum_n f_n g_{-n}."""
    out = np.zeros(grid.n, dtype=complex)
    for n, fv in modes_f.items():
        gv = modes_g.get(-n)
        if gv is not None:
            out = out + np.asarray(fv) * np.asarray(gv)
    return out
