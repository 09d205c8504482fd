"""Fixed-point solve of the steady nonlinear perturbation system and the
low-Mach-number comparison study."""

from dataclasses import dataclass, field

import numpy as np

from .data import modes_to_physical, physical_to_modes
from .linear_solver import solve_linear_ns, sobolev_mode_norm, FlowState


@dataclass
class PicardState:
    state: FlowState
    iterations: int
    increments: list
    converged: bool
    residual: float = None
    diagnostics: dict = field(default_factory=dict)


def _pressure_deriv_excess(rho, gamma, mach):
    """P'(1+rho) - P'(1) for the gamma-law pressure normalized so that
    P'(1) = 1/mach^2."""
    return ((1.0 + rho) ** (gamma - 1.0) - 1.0) / mach ** 2


class NonlinearAssembler:
    """Evaluates the quadratic terms of a flow state on a dealiased x-grid."""

    def __init__(self, profile, grid, nu, torus_len, n_max, gamma=1.4):
        self.profile = profile
        self.grid = grid
        self.nu = nu
        self.torus_len = torus_len
        self.n_max = n_max
        self.gamma = gamma
        self.m_points = 4 * n_max + 8
        self.us = profile.us(grid.nodes)
        self.dy_us = profile.us(grid.nodes, 1) / np.sqrt(nu)
        self.khat = np.array([self._wave(j) for j in range(self.m_points)])

    def _wave(self, j):
        n = j if j <= self.m_points // 2 else j - self.m_points
        return n / self.torus_len

    def _dx(self, values):
        coef = np.fft.fft(values, axis=0)
        return np.fft.ifft(1j * self.khat[:, None] * coef, axis=0)

    def _dy(self, values):
        return values @ (self.grid.d1.T / np.sqrt(self.nu))

    def physical(self, modes):
        return modes_to_physical(modes, self.m_points, self.grid)

    def nonlinear_terms(self, state, force):
        """Continuity source and momentum nonlinearities of a FlowState.

        Returns mode dicts (g_rho, n_u, n_v) truncated to |n| <= n_max,
        plus the physical-space transport fields in the diagnostics.
        """
        rho = self.physical(state.mode_fields("rho"))
        u = self.physical(state.mode_fields("u"))
        v = self.physical(state.mode_fields("v"))
        rho_inf = np.abs(rho).max()
        if rho_inf >= 1.0:
            raise FloatingPointError(
                f"density excursion: |rho|_inf = {rho_inf:.3f} >= 1")

        f1 = self.physical(force.component_modes(0)) if force else 0.0
        f2 = self.physical(force.component_modes(1)) if force else 0.0

        dxrho, dyrho = self._dx(rho), self._dy(rho)
        one_rho = 1.0 + rho
        pex = _pressure_deriv_excess(np.real(rho), self.gamma,
                                     self.profile.mach)
        # products keep the full complex fields; for Hermitian data the
        # imaginary parts cancel in the mode projection
        n_u = (-self._dx(one_rho * u * u)
               - self.us[None, :] * self._dx(rho * u)
               - self._dy(one_rho * u * v)
               - rho * v * self.dy_us[None, :]
               - pex * dxrho
               + one_rho * f1)
        n_v = (-self._dx(one_rho * u * v)
               - self.us[None, :] * self._dx(rho * v)
               - self._dy(one_rho * v * v)
               - pex * dyrho
               + one_rho * f2)
        g_rho = -self._dx(rho * u) - self._dy(rho * v)

        out = tuple(physical_to_modes(x, self.n_max)
                    for x in (g_rho, n_u, n_v))
        diag = {"rho_inf": float(rho_inf),
                "transport_inf": float(max(np.abs(u).max(),
                                           np.abs(v).max()))}
        return out + (diag,)


def fields_norm_2(rho_w, u_m, v_m, nu, torus_len, grid):
    """The middle-order norm combination of raw mode dicts; rho_w already
    carries the m^-2 weight."""
    sq = np.sqrt(nu)
    area = 2.0 * np.pi * torus_len

    def l2(md):
        return float(np.sqrt(sum(area * sq * grid.norm_l2(x) ** 2
                                 for n, x in md.items() if n != 0)))

    z_linf = max([np.abs(md.get(0, np.zeros(1))).max()
                  for md in (rho_w, u_m, v_m)])
    z_l2 = float(np.hypot(
        np.sqrt(sq) * grid.norm_l2(rho_w.get(0, np.zeros(grid.n))),
        np.sqrt(sq) * grid.norm_l2(v_m.get(0, np.zeros(grid.n)))))
    v0 = v_m.get(0)
    v0_l1 = sq * grid.norm_l1(v0) if v0 is not None else 0.0

    def grad(order, mds):
        return float(np.hypot.reduce(
            [sobolev_mode_norm(md, order, nu, torus_len, grid)
             for md in mds]))

    return (v0_l1 + z_linf + z_l2
            + float(np.hypot.reduce([l2(rho_w), l2(u_m), l2(v_m)]))
            + nu ** 0.5 * grad(1, [rho_w, u_m, v_m])
            + nu ** (13.0 / 8.0) * grad(2, [u_m, v_m])
            + nu ** (13.0 / 8.0) * grad(2, [rho_w])
            + nu ** (21.0 / 8.0) * grad(3, [u_m, v_m]))


def state_difference_norm(s1, s2, grid, rho_weight=None):
    """||s1 - s2||_2 with the density weighted by 1/mach^2 (per state's own
    Mach number unless rho_weight overrides)."""
    def wdict(s):
        w = rho_weight if rho_weight is not None else s.mach ** -2
        return {n: w * v for n, v in s.mode_fields("rho").items()}

    rho = {n: wdict(s1).get(n, 0) - wdict(s2).get(n, 0)
           for n in set(wdict(s1)) | set(wdict(s2))}
    u = {n: s1.mode_fields("u").get(n, 0) - s2.mode_fields("u").get(n, 0)
         for n in set(s1.mode_fields("u")) | set(s2.mode_fields("u"))}
    v = {n: s1.mode_fields("v").get(n, 0) - s2.mode_fields("v").get(n, 0)
         for n in set(s1.mode_fields("v")) | set(s2.mode_fields("v"))}
    return fields_norm_2(rho, u, v, s1.nu, s1.torus_len, grid)


def picard_solve(force, nu, lam, torus_len, profile, grid, n_max,
                 gamma=1.4, max_iter=40, tol=1e-9, thresholds=None,
                 mode_tol=1e-10, collect=None):
    """Picard iteration from rest: each step solves the linearized system
    with the previous iterate's nonlinearity as data.

    Converges for small forcing; increments are tracked in the
    middle-order norm and divergence raises FloatingPointError/
    IterationDiverged from the inner machinery.
    """
    asm = NonlinearAssembler(profile, grid, nu, torus_len, n_max, gamma)
    ops_cache = {}
    state = None
    increments = []
    converged = False
    zero = np.zeros(grid.n, dtype=complex)
    for it in range(max_iter):
        if state is None:
            g_rho = {n: zero for n in range(-n_max, n_max + 1)}
            n_u = {n: force.modes.get(n, (zero, zero))[0]
                   for n in range(-n_max, n_max + 1)}
            n_v = {n: force.modes.get(n, (zero, zero))[1]
                   for n in range(-n_max, n_max + 1)}
            diag = {}
        else:
            g_rho, n_u, n_v, diag = asm.nonlinear_terms(state, force)
        data = {n: (g_rho.get(n, zero), n_u.get(n, zero), n_v.get(n, zero))
                for n in range(-n_max, n_max + 1)}
        new_state = solve_linear_ns(data, nu, lam, torus_len, profile,
                                    grid, thresholds=thresholds,
                                    tol_iter=mode_tol, ops_cache=ops_cache)
        if state is not None:
            inc = state_difference_norm(new_state, state, grid)
            increments.append(inc)
            base = new_state.norms["norm_2"] + 1e-300
            if collect is not None:
                collect.append({"iter": it, "increment": inc,
                                "norm_2": new_state.norms["norm_2"],
                                **diag})
            if inc <= tol * base:
                state = new_state
                converged = True
                break
        state = new_state
    ps = PicardState(state=state, iterations=len(increments) + 1,
                     increments=increments, converged=converged)
    ps.residual = nonlinear_residual(state, force, asm, lam, thresholds,
                                     ops_cache)
    ps.diagnostics["mass"] = abs(state.zero.mass) * 2 * np.pi * torus_len
    ps.diagnostics["div_trace"] = divergence_wall_trace(state, grid)
    return ps


def divergence_wall_trace(state, grid):
    """sup over modes of |i n/L u_n(0) + dy v_n(0)|."""
    worst = 0.0
    sq = np.sqrt(state.nu)
    for n, sol in state.modes.items():
        tr = abs(1j * (n / state.torus_len) * sol.u[0]
                 + (grid.d1[0] @ sol.v) / sq)
        worst = max(worst, float(tr))
    return worst


def nonlinear_residual(state, force, asm, lam, thresholds, ops_cache):
    """Relative residual of the full nonlinear system at a flow state:
    apply the linear operator mode by mode and compare with the
    nonlinearity the state should balance, normalized by the global data
    plus cancellation scale."""
    from .linear_solver import full_matrix, _interior_rows_3n, \
        solve_zero_mode
    from .operators import ModeOperators

    g_rho, n_u, n_v, _ = asm.nonlinear_terms(state, force)
    grid = asm.grid
    nu = state.nu
    sq = np.sqrt(nu)
    w3 = np.sqrt(np.concatenate([grid.weights] * 3))
    num_sq, den = 0.0, 0.0
    mask = np.ones(3 * grid.n, dtype=bool)
    mask[_interior_rows_3n(grid.n)] = False
    for n, sol in state.modes.items():
        if n <= 0:
            continue    # Hermitian pair of +n
        n_hat = n / state.torus_len
        ops = ops_cache.get(abs(n)) or ModeOperators(
            grid, asm.profile, n_hat * sq, 1.0 / n_hat)
        rhs = sq * np.concatenate([g_rho[n], n_u[n], n_v[n]])
        mat = full_matrix(ops, lam)
        x = sol.stack()
        r = mat @ x - rhs
        cancel = np.abs(mat) @ np.abs(x)
        num_sq += np.linalg.norm((w3 * r)[mask]) ** 2
        den += (np.linalg.norm((w3 * rhs)[mask])
                + np.linalg.norm((w3 * cancel)[mask]))
    # zero mode: compare with the closed-form solve at the same data
    z = solve_zero_mode(g_rho[0], n_u[0], n_v[0], nu, lam, asm.profile,
                        grid)
    num_sq += (grid.norm_l2(z.rho - state.zero.rho) ** 2
               + grid.norm_l2(z.u - state.zero.u) ** 2
               + grid.norm_l2(z.v - state.zero.v) ** 2)
    den += (grid.norm_l2(z.rho) + grid.norm_l2(z.u) + grid.norm_l2(z.v))
    return float(np.sqrt(num_sq) / max(den, 1e-300))


def low_mach_compare(m_values, force, nu, lam, torus_len, grid, n_max,
                     gamma=1.4, decay_rate=4.0, max_iter=40, tol=1e-9,
                     thresholds=None):
    """Solve the nonlinear system along a descending list of Mach numbers
    and fit the convergence rate of the differences to the smallest-m
    solution (the incompressible proxy)."""
    from .profiles import make_default_profile

    m_values = sorted(m_values, reverse=True)
    states = {}
    for m in m_values:
        profile = make_default_profile(m, decay_rate)
        ps = picard_solve(force, nu, lam, torus_len, profile, grid, n_max,
                          gamma=gamma, max_iter=max_iter, tol=tol,
                          thresholds=thresholds)
        if not ps.converged:
            raise RuntimeError(f"nonlinear solve did not converge at m={m}")
        states[m] = ps.state

    m_ref = m_values[-1]
    ref = states[m_ref]
    diffs = {}
    linf_rho = {}
    for m in m_values[:-1]:
        diffs[m] = state_difference_norm(states[m], ref, grid)
        pm = {n: v / m ** 2 for n, v in
              states[m].mode_fields("rho").items()}
        pr = {n: v / m_ref ** 2 for n, v in ref.mode_fields("rho").items()}
        worst = max(np.abs(pm[n] - pr.get(n, 0)).max() for n in pm)
        linf_rho[m] = float(worst)
    ms = np.array(sorted(diffs))
    ds = np.array([diffs[m] for m in ms])
    slope = None
    if len(ms) >= 2:
        slope = float(np.polyfit(np.log(ms), np.log(ds), 1)[0])
    return {"diffs": diffs, "linf_rho": linf_rho, "slope": slope,
            "states": states, "m_ref": m_ref}
