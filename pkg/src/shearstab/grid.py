"""Semi-infinite domain discretization.

The half line is truncated to [0, Y_max] and discretized with mapped
Chebyshev-Gauss-Lobatto nodes.  Differentiation matrices are built directly
on the mapped nodes with the Weideman-Reddy polynomial differentiation
algorithm, so they are exact for polynomials and spectrally accurate for
smooth functions.  Quadrature weights are Clenshaw-Curtis weights times the
map Jacobian.
"""

import numpy as np

_MAPPINGS = ("uniform", "stretched")


def _cheb_nodes(n):
    """Chebyshev-Gauss-Lobatto points on [-1, 1], increasing."""
    return -np.cos(np.pi * np.arange(n) / (n - 1))


def polydiff(x, order):
    """Differentiation matrices D1..Dorder on arbitrary distinct nodes x.

    Implements the Weideman-Reddy recursion for barycentric polynomial
    differentiation; row sums vanish identically (negative-sum trick), so
    constants are differentiated to exactly zero.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    # barycentric weight ratios c_i/c_j computed via logs to avoid overflow
    logc = np.sum(np.log(np.abs(dx)), axis=1)
    sgnc = np.prod(np.sign(dx), axis=1)
    cr = np.exp(logc[:, None] - logc[None, :]) * (sgnc[:, None] * sgnc[None, :])
    zinv = 1.0 / dx
    np.fill_diagonal(zinv, 0.0)

    mats = []
    d_prev = np.eye(n)
    for ell in range(1, order + 1):
        diag_prev = np.diag(d_prev)[:, None]
        d_cur = ell * zinv * (cr * diag_prev - d_prev)
        np.fill_diagonal(d_cur, 0.0)
        np.fill_diagonal(d_cur, -d_cur.sum(axis=1))
        mats.append(d_cur)
        d_prev = d_cur
    return mats


def _clencurt_weights(n):
    """Clenshaw-Curtis weights on the CGL nodes (increasing order), [-1,1]."""
    if n < 2:
        raise ValueError("need at least 2 nodes")
    m = n - 1
    w = np.zeros(n)
    theta = np.pi * np.arange(n) / m
    v = np.ones(n)
    for k in range(1, m // 2 + 1):
        factor = 2.0 if 2 * k != m else 1.0
        v -= factor * np.cos(2 * k * theta) / (4 * k * k - 1)
    w = 2.0 * v / m
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


class Grid:
    """Collocation grid on [0, Y_max] with derivative operators and weights.

    Attributes
    ----------
    nodes : (N,) increasing array, nodes[0] == 0, nodes[-1] == Y_max
    d1, d2, d3 : dense differentiation matrices
    weights : quadrature weights, positive
    mapping : "uniform" or "stretched"
    """

    def __init__(self, nodes, d1, d2, d3, weights, mapping, y_max):
        self.nodes = nodes
        self.d1 = d1
        self.d2 = d2
        self.d3 = d3
        self.weights = weights
        self.mapping = mapping
        self.y_max = y_max
        self.n = nodes.size
        self._antideriv_lu = {}

    # -- integral helpers ------------------------------------------------

    def integrate(self, f):
        """Quadrature of f over [0, Y_max]."""
        return np.dot(self.weights, np.asarray(f))

    def norm_l2(self, f):
        f = np.asarray(f)
        return float(np.sqrt(np.real(np.dot(self.weights, np.abs(f) ** 2))))

    def norm_l1(self, f):
        return float(np.dot(self.weights, np.abs(np.asarray(f))))

    def antiderivative(self, f, from_left=True):
        """Pointwise antiderivative of the interpolant of f.

        from_left:  F(Y) = int_0^Y f,      F(0) = 0
        otherwise:  F(Y) = -int_Y^Ymax f,  F(Y_max) = 0
        """
        import scipy.linalg as sla

        key = bool(from_left)
        if key not in self._antideriv_lu:
            a = self.d1.astype(float).copy()
            idx = 0 if from_left else self.n - 1
            a[idx, :] = 0.0
            a[idx, idx] = 1.0
            self._antideriv_lu[key] = (sla.lu_factor(a), idx)
        lu, idx = self._antideriv_lu[key]
        rhs = np.asarray(f, dtype=complex).copy()
        rhs[idx] = 0.0
        return sla.lu_solve(lu, rhs)

    def interpolate(self, f, targets):
        """Barycentric interpolation of grid values f onto target points.

        Interpolation happens in the computational coordinate, where the
        nodes are Chebyshev points and the barycentric weights are benign.
        """
        targets = np.atleast_1d(np.asarray(targets, dtype=float))
        if getattr(self, "_inv_map", None) is not None:
            x = self._s
            tx = self._inv_map(targets)
        else:
            x = getattr(self, "_s", self.nodes / self.y_max)
            tx = targets / self.y_max
        m = x.size - 1
        w = (-1.0) ** np.arange(x.size)
        w[0] *= 0.5
        w[-1] *= 0.5
        out = np.empty(targets.size, dtype=complex)
        f = np.asarray(f, dtype=complex)
        for i, t in enumerate(tx):
            diff = t - x
            hit = np.nonzero(diff == 0.0)[0]
            if hit.size:
                out[i] = f[hit[0]]
            else:
                q = w / diff
                out[i] = np.dot(q, f) / q.sum()
        return out


def build_grid(n, y_max, mapping="stretched", stretch=4.0):
    """Build a Grid with N nodes on [0, y_max].

    mapping "uniform" applies the linear map of the Chebyshev nodes;
    "stretched" applies Y = y_max*(exp(a*s)-1)/(exp(a)-1) which clusters
    nodes near Y=0 to resolve the viscous sublayer.
    """
    if n < 16:
        raise ValueError("grid too coarse: N >= 16 required")
    if y_max < 10:
        raise ValueError("domain too short: Y_max >= 10 required")
    if mapping not in _MAPPINGS:
        raise ValueError(f"unknown mapping {mapping!r}; use one of {_MAPPINGS}")

    s = (_cheb_nodes(n) + 1.0) / 2.0  # [0, 1], increasing
    if mapping == "uniform":
        nodes = y_max * s
        ys = np.full(n, y_max)
        yss = np.zeros(n)
        ysss = np.zeros(n)
        inv_map = None
    else:
        a = float(stretch)
        den = np.expm1(a)
        nodes = y_max * np.expm1(a * s) / den
        ys = y_max * a * np.exp(a * s) / den
        yss = a * ys
        ysss = a * a * ys

        def inv_map(y):
            return np.log1p(np.asarray(y) * den / y_max) / a

    nodes[0] = 0.0
    nodes[-1] = y_max

    # differentiate in the computational variable s, then chain rule
    ds1, ds2, ds3 = polydiff(s, 3)
    d1 = ds1 / ys[:, None]
    d2 = ds2 / (ys ** 2)[:, None] - (yss / ys ** 3)[:, None] * ds1
    d3 = (ds3 / (ys ** 3)[:, None]
          - (3.0 * yss / ys ** 4)[:, None] * ds2
          + (3.0 * yss ** 2 / ys ** 5 - ysss / ys ** 4)[:, None] * ds1)
    weights = _clencurt_weights(n) / 2.0 * ys
    grid = Grid(nodes, d1, d2, d3, weights, mapping, float(y_max))
    grid._s = s
    grid._inv_map = inv_map
    return grid


class ComplexField:
    """Complex scalar samples on a Grid."""

    def __init__(self, values, grid):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.n,):
            raise ValueError("field length does not match grid size")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        self.values = values
        self.grid = grid

    @classmethod
    def from_callable(cls, fn, grid):
        return cls(np.asarray([fn(y) for y in grid.nodes], dtype=complex), grid)

    def __len__(self):
        return self.values.size
