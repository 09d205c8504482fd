"""Discrete operators of the per-mode linear theory.

All matrices are assembled from one grid's differentiation operators, so
algebraic identities between the composed operators (the symmetrized
fourth-order operator as Airy/Rayleigh compositions, commutators, error
terms) hold exactly in floating point.  That makes iteration residuals
measure the truncation tail of the scheme rather than discretization
mismatch.
"""

import numpy as np
import scipy.linalg as sla


def divide_by_us(f, grid, profile, rel_tol=1e-8):
    """f / Us with the L'Hopital value f'(0)/Us'(0) at the wall.

    Rejects fields with f(0) != 0 (the quotient would not be square
    integrable).
    """
    f = np.asarray(f, dtype=complex)
    us = profile.us(grid.nodes)
    scale = np.abs(f).max()
    if scale > 0 and abs(f[0]) > rel_tol * scale:
        raise ValueError("field does not vanish at the wall; f/Us is "
                         "singular")
    out = np.empty_like(f)
    out[1:] = f[1:] / us[1:]
    out[0] = (grid.d1[0] @ f) / profile.us(0.0, 1)
    return out


class ModeOperators:
    """Coefficient matrices for one (alpha, eps) pair on a grid/profile.

    eps is the inverse rescaled frequency 1/n_hat and alpha = n_hat*sqrt(nu),
    so sqrt(nu) = eps*alpha.
    """

    def __init__(self, grid, profile, alpha, eps):
        self.grid = grid
        self.profile = profile
        self.alpha = float(alpha)
        self.eps = float(eps)
        self.sqrt_nu = self.eps * self.alpha

        t = profile.tables(grid)
        self.us = t["us"]
        self.us1 = t["us1"]
        self.us2 = t["us2"]
        self.us3 = t["us3"]
        self.a = t["a"]
        self.a1 = t["a1"]
        self.a2 = t["a2"]
        self.ainv = 1.0 / self.a
        self.dainv = -self.a1 / self.a ** 2
        self.d2ainv = (2.0 * self.a1 ** 2 - self.a * self.a2) / self.a ** 3
        # c = dY(A^-1 Us') and its quotient by Us
        self.c = self.ainv * self.us2 + self.dainv * self.us1
        self._c_over_us = None
        self._lu = {}
        self._mat = {}

    # -- coefficient helpers ---------------------------------------------

    @property
    def c_over_us(self):
        """c/Us; requires c(0)=0 (true when Us''(0)=0, e.g. tanh)."""
        if self._c_over_us is None:
            self._c_over_us = divide_by_us(self.c, self.grid, self.profile)
            self._c_over_us = np.real(self._c_over_us)
        return self._c_over_us

    # -- matrices (cached) -------------------------------------------------

    def _get(self, name, builder):
        if name not in self._mat:
            self._mat[name] = builder()
        return self._mat[name]

    @property
    def ident(self):
        return self._get("ident", lambda: np.eye(self.grid.n))

    @property
    def delta_alpha(self):
        return self._get(
            "delta_alpha",
            lambda: self.grid.d2 - self.alpha ** 2 * self.ident)

    @property
    def lam(self):
        """Modified vorticity operator dY(A^-1 dY .) - alpha^2."""
        def build():
            g = self.grid
            return (self.ainv[:, None] * g.d2 + self.dainv[:, None] * g.d1
                    - self.alpha ** 2 * self.ident)
        return self._get("lam", build)

    @property
    def ray(self):
        """Rayleigh operator Us*Lam - c."""
        return self._get(
            "ray", lambda: self.us[:, None] * self.lam - np.diag(self.c))

    @property
    def ray_divided(self):
        """Rayleigh divided by Us*A^-1: regular second-order form."""
        def build():
            g = self.grid
            return (g.d2 - (self.a1 / self.a)[:, None] * g.d1
                    - np.diag(self.alpha ** 2 * self.a
                              + self.c_over_us * self.a))
        return self._get("ray_divided", build)

    @property
    def tilde_airy(self):
        return self._get(
            "tilde_airy",
            lambda: 1j * self.eps * self.lam + np.diag(self.us))

    @property
    def airy_neumann(self):
        return self._get(
            "airy_neumann",
            lambda: 1j * self.eps * self.delta_alpha + np.diag(self.us))

    @property
    def os_sym(self):
        """Symmetrized fourth-order operator i*eps*Delta_a*Lam + Ray."""
        return self._get(
            "os_sym",
            lambda: 1j * self.eps * (self.delta_alpha @ self.lam) + self.ray)

    @property
    def os_full(self):
        """Original operator i*eps*Lam*Delta_a + Ray."""
        return self._get(
            "os_full",
            lambda: 1j * self.eps * (self.lam @ self.delta_alpha) + self.ray)

    @property
    def os_mod(self):
        """The auxiliary fourth-order operator for derivative-form sources:
        i*eps*Delta_a*Lam + dY(A^-1 Us dY .) - alpha^2 Us."""
        def build():
            g = self.grid
            second = (g.d1 @ (np.diag(self.ainv * self.us) @ g.d1)
                      - self.alpha ** 2 * np.diag(self.us))
            return 1j * self.eps * (self.delta_alpha @ self.lam) + second
        return self._get("os_mod", build)

    def commutator_source(self, phi):
        """g with [Lam, Delta_a] phi = -dY(g):
        g = 2 dY(A^-1) phi'' + dY^2(A^-1) phi'."""
        g = self.grid
        return (2.0 * self.dainv * (g.d2 @ phi)
                + self.d2ainv * (g.d1 @ phi))

    # -- boundary rows -----------------------------------------------------

    def bc_row(self, kind, node):
        g = self.grid
        if kind == "dirichlet":
            row = np.zeros(g.n)
            row[node] = 1.0
            return row
        if kind == "neumann":
            return g.d1[node].copy()
        if kind == "delta_alpha":
            return self.delta_alpha[node].copy()
        if kind == "dy_lam":
            return (g.d1 @ self.lam)[node].copy()
        raise ValueError(f"unknown boundary row {kind!r}")

    # -- solving -----------------------------------------------------------

    def solve(self, name, matrix, rhs, bcs):
        """Dense solve with boundary rows replacing equation rows.

        bcs: sequence of (row_index, row_vector, value).  The factorization
        is cached under `name` (callers use one name per boundary-row
        structure), so repeated solves with new right-hand sides only pay
        the back substitution.
        """
        if name not in self._lu:
            a = np.array(matrix, dtype=complex)
            for row, vec, _ in bcs:
                a[row, :] = vec
            self._lu[name] = sla.lu_factor(a)
        lu = self._lu[name]
        b = np.asarray(rhs, dtype=complex).copy()
        for row, _, value in bcs:
            b[row] = value
        return sla.lu_solve(lu, b)


def relative_residual(matrix, x, rhs, grid, skip_rows, weighted=True):
    """Residual of matrix@x = rhs on non-boundary rows, normalized by the
    data plus the cancellation scale |matrix| |x| (so exact solves score at
    rounding level regardless of operator conditioning)."""
    x = np.asarray(x, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    r = matrix @ x - rhs
    mask = np.ones(grid.n, dtype=bool)
    mask[list(skip_rows)] = False
    cancel = np.abs(matrix) @ np.abs(x)
    if weighted:
        w = np.sqrt(grid.weights[mask])
        num = np.linalg.norm(w * r[mask])
        den = np.linalg.norm(w * rhs[mask]) + np.linalg.norm(w * cancel[mask])
    else:
        num = np.linalg.norm(r[mask])
        den = np.linalg.norm(rhs[mask]) + np.linalg.norm(cancel[mask])
    return num / den if den > 0 else num


def block_matrix(blocks):
    """Assemble a dense block matrix from a 2-D list of (n x n) blocks."""
    return np.block([[b if b is not None else np.zeros_like(blocks[0][0])
                      for b in row] for row in blocks])
