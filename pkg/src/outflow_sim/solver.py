"""Time integration of the Lagrangian system on the moving mass domain.

Unknowns are v (specific volume) and u (velocity) at nodes
x_i(t) = B(t) + s_i (M(t) - B(t)) with fixed s_i in [0, 1]. In these
coordinates the system reads

    dv_i/dt = (r^(n-1) u)_x + w_i v_x,
    du_i/dt = mu r^(n-1) ((r^(n-1) u)_x / v)_x - r^(n-1) p(v)_x + w_i u_x,

with mesh velocity w_i = B' + s_i (M' - B'), B' = |u_b| / v(B) and
M' = rho1 |u_b|. Boundary data are u(B) = u_b, u(M) = ut(m), v(M) = vt(m);
there is no condition on v at the outflow end.

Two integrators are provided. ``theta`` is the first-order splitting: the
viscous term is theta-implicit (one tridiagonal solve), pressure and mesh
advection are explicit, and continuity uses the new velocity. ``imex2`` is
the ARS(2,2,2) implicit-explicit Runge-Kutta pair with the same implicit
and explicit split; it is second order in time and L-stable in the stiff
viscous part.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .cutoffs import phi_m
from .errors import (DomainError, InsufficientResolutionError, NumericalError, OutflowError,
                     PositivityLossError, RangeError)
from .lagrangian import CoordinateMap, LagrangianState
from .model import pressure_eulerian
from .stationary import sample_profile

log = logging.getLogger(__name__)

SNAPSHOT_HEADER = ("t", "x", "s", "r", "v", "u", "phi", "psi")

_ARS_G = 1.0 - 1.0 / np.sqrt(2.0)
_ARS_D = 1.0 - 1.0 / (2.0 * _ARS_G)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class SolverConfig:
    m: float = 40.0
    N: int = 512
    cfl: float = 0.5
    t_end: float = 10.0
    theta: float = 1.0
    stride: int = 1
    scheme: str = "imex2"
    dt: float = None
    max_retries: int = 8
    grid: str = "graded"
    tail: float = 4.0
    grading: float = 2.0
    dr: float = None
    dense_until: float = 0.0

    def __post_init__(self):
        if self.N < 16:
            raise RangeError("N must be at least 16", N=self.N)
        if not 0.5 <= self.theta <= 1.0:
            raise RangeError("theta must lie in [0.5, 1]", theta=self.theta)
        if not 0.0 < self.cfl < 1.0:
            raise RangeError("cfl must lie in (0, 1)", cfl=self.cfl)
        if self.m <= 1.0:
            raise RangeError("m must exceed 1", m=self.m)
        if self.stride < 1:
            raise RangeError("snapshot stride must be >= 1", stride=self.stride)
        if self.scheme not in ("imex2", "theta"):
            raise RangeError("unknown scheme", scheme=self.scheme)
        if self.grid not in ("uniform-r", "uniform-mass", "graded"):
            raise RangeError("unknown grid policy", grid=self.grid)
        if self.dr is not None and not self.dr > 0:
            raise RangeError("dr must be positive", dr=self.dr)
        if not (self.tail > 0 and self.grading > 0):
            raise RangeError("tail and grading must be positive", tail=self.tail, grading=self.grading)
        if self.dt is not None and not self.dt > 0:
            raise RangeError("dt must be positive", dt=self.dt)


@dataclass(frozen=True, eq=False)
class InitialData:
    """Cut-off modified Eulerian data on [1, m] with nodal samples."""

    m: float
    profile: object
    rho_fn: object
    u_fn: object
    r: np.ndarray
    rho: np.ndarray
    u: np.ndarray


def build_initial_data(rho0, u0, profile, m, nodes=2001):
    """Blend (rho0, u0) into the stationary profile with the cut-off phi_m.

    ``nodes`` is either a node count for a uniform radial grid or an explicit
    array of radii used for the nodal samples.
    """
    if m > profile.r_max:
        raise RangeError("profile does not reach r = m", m=m, r_max=profile.r_max)

    def rho_fn(r):
        r = np.asarray(r, dtype=float)
        rt, *_ = sample_profile(profile, r)
        val = np.asarray(rho0(r), dtype=float)
        if np.any(val <= 0):
            raise DomainError("initial density must be positive")
        return (val - rt) * phi_m(r, m) + rt

    def u_fn(r):
        r = np.asarray(r, dtype=float)
        _, ut, *_ = sample_profile(profile, r)
        return (np.asarray(u0(r), dtype=float) - ut) * phi_m(r, m) + ut

    if np.ndim(nodes) == 0:
        r = np.linspace(1.0, m, int(nodes))
    else:
        r = np.asarray(nodes, dtype=float)
    rho = rho_fn(r)
    u = u_fn(r)
    # boundary agreement is exact, not just to interpolation accuracy
    rho_m, u_m, *_ = sample_profile(profile, m)
    if r[-1] == m:
        rho[-1], u[-1] = rho_m, u_m
    return InitialData(m, profile, rho_fn, u_fn, r, rho, u)


def _fd_weights(nodes, x0, order):
    # weights of the interpolating polynomial derivative at x0
    k = nodes.size
    h = nodes - x0
    scale = np.max(np.abs(h))
    A = np.vander(h / scale, k, increasing=True).T
    rhs = np.zeros(k)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(A, rhs) / scale ** order


def check_compatibility(init, params, tol=1e-4):
    """Residuals of the boundary compatibility conditions at r = 1.

    The momentum residual is mu (r^(1-n)(r^(n-1)u)_r)_r - P(rho)_r - rho u u_r,
    the sign that makes the stationary profile compatible.
    """
    r, rho, u = init.r, init.rho, init.u
    if r.size < 5 or r[0] != 1.0:
        raise InsufficientResolutionError("need at least five nodes starting at r = 1")
    n, mu = params.n, params.mu
    nodes = r[:5]
    w1 = _fd_weights(nodes, 1.0, 1)
    w2 = _fd_weights(nodes, 1.0, 2)
    u1, u_r, u_rr = u[0], w1 @ u[:5], w2 @ u[:5]
    P_r = w1 @ pressure_eulerian(rho[:5], params)
    div_r = u_rr + (n - 1) * u_r - (n - 1) * u1
    momentum = mu * div_r - P_r - rho[0] * u1 * u_r
    boundary = abs(u1 - params.u_b)
    return {
        "velocity": float(boundary),
        "momentum": float(abs(momentum)),
        "tol": tol,
        "passed": bool(boundary <= tol and abs(momentum) <= tol),
    }


def _mass_table(rho_fn, r_nodes, n):
    a, b = r_nodes[:-1], r_nodes[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    z = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = rho_fn(z.ravel()).reshape(z.shape)
    if np.any(vals <= 0):
        raise DomainError("density must be positive for the mass quadrature")
    seg = half * ((vals * z ** (n - 1)) @ _GL_W)
    cum = np.zeros(r_nodes.size)
    cum[1:] = np.cumsum(seg)
    return cum


def graded_mass_nodes(cum, fine, n, cfg, X0=None):
    """Mass nodes uniform in r in the bulk and refined toward the outer end.

    The local mass spacing is min(lam rho r^(n-1) dr, dr (c_t + a (M0 - x)))
    with dr = (m - 1)/(N - 1), c_t = ``tail`` and a = ``grading``; lam is
    chosen so that exactly N nodes fit. Both spacings scale with dr, so the
    grids for different N form one refinement family.

    With ``cfg.dr`` set, lam = 1 and the bulk nodes sit exactly at
    r = 1 + i dr, so runs with different m share their inner nodes; the
    node count then follows from dr.
    """
    M0 = cum[-1]
    N = cfg.N
    dr = cfg.dr if cfg.dr is not None else (fine[-1] - 1.0) / (N - 1)
    xf = np.linspace(0.0, M0, 16 * max(N, int((fine[-1] - 1.0) / dr)) + 1)
    rf = np.interp(xf, cum, fine)
    rho_r = np.interp(xf, cum[:-1] + 0.5 * np.diff(cum),
                      np.diff(cum) / np.diff(fine) / (0.5 * (fine[1:] + fine[:-1])) ** (n - 1))
    bulk = rho_r * rf ** (n - 1) * dr
    tail = dr * (cfg.tail + cfg.grading * (M0 - xf))

    def counts(lam, start=0):
        dens = 1.0 / np.minimum(lam * bulk[start:], tail[start:])
        c = np.zeros(xf.size - start)
        c[1:] = np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(xf[start:]))
        return c

    if cfg.dr is None:
        lam = brentq(lambda l: counts(l)[-1] - (N - 1), 1e-3, 1e3, xtol=1e-13)
        c = counts(lam)
        x = np.interp(np.arange(N, dtype=float), c, xf)
        x[0], x[-1] = 0.0, M0
        return x
    switch = int(np.argmax(tail < bulk)) if np.any(tail < bulk) else xf.size - 1
    r_switch = rf[switch]
    r_bulk = 1.0 + dr * np.arange(int(np.floor((r_switch - 1.0) / dr)) + 1)
    x_bulk = X0(r_bulk)
    x_bulk[0] = 0.0
    start = int(np.searchsorted(xf, x_bulk[-1]))
    xs = np.concatenate([[x_bulk[-1]], xf[start:]])
    dens = 1.0 / tail[max(start - 1, 0):][: xs.size]
    c = np.zeros(xs.size)
    c[1:] = np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(xs))
    k = max(int(np.round(c[-1])), 1)
    x_tail = np.interp(np.arange(1, k + 1, dtype=float) * c[-1] / k, c, xs)
    x = np.concatenate([x_bulk, x_tail])
    x[-1] = M0
    return x


def _invert_mass(X0, rho_fn, x, cum, fine, n):
    """R_0 = X_0^(-1)(x): safeguarded Newton, brentq where Newton stalls."""
    h = fine[1] - fine[0]
    guess = np.interp(x, cum, fine)
    lo = np.maximum(fine[0], guess - 2.0 * h)
    hi = np.minimum(fine[-1], guess + 2.0 * h)
    r = guess.copy()
    tol = 1e-14 * max(1.0, float(cum[-1]))
    for _ in range(8):
        res = X0(r) - x
        step = res / (rho_fn(r) * r ** (n - 1))
        r = np.clip(r - step, lo, hi)
        if np.all(np.abs(res) <= tol):
            break
    bad = np.flatnonzero(np.abs(X0(r) - x) > tol)
    for i in bad:
        r[i] = brentq(lambda q: X0(q)[0] - x[i], lo[i], hi[i], xtol=1e-14, rtol=1e-15)
    return r


def initialize_lagrangian(init, cfg, params):
    """Mass grid, R_0 by monotone root finding, and nodal (v, u)."""
    n = params.n
    m = init.m
    fine = np.linspace(1.0, m, max(4 * cfg.N, 2001))
    cum = _mass_table(init.rho_fn, fine, n)
    M0 = float(cum[-1])

    def X0(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        j = np.clip(np.searchsorted(fine, r, side="right") - 1, 0, fine.size - 2)
        a = fine[j]
        mid, half = 0.5 * (a + r), 0.5 * (r - a)
        z = mid[:, None] + half[:, None] * _GL_X
        vals = init.rho_fn(z.ravel()).reshape(z.shape) * z ** (n - 1)
        return cum[j] + half * (vals @ _GL_W)

    if cfg.grid == "uniform-r":
        target = np.linspace(1.0, m, cfg.N)
        x = X0(target)
        x[0], x[-1] = 0.0, M0
        s = x / M0
    elif cfg.grid == "graded":
        x = graded_mass_nodes(cum, fine, n, cfg, X0)
        s = x / M0
    else:
        s = np.linspace(0.0, 1.0, cfg.N)
        x = s * M0
    R0 = _invert_mass(X0, init.rho_fn, x, cum, fine, n)
    R0[0], R0[-1] = 1.0, m
    rho = init.rho_fn(R0)
    u = init.u_fn(R0)
    rho_m, u_m, *_ = sample_profile(init.profile, m)
    rho[-1], u[-1] = rho_m, u_m
    u[0] = params.u_b
    v = 1.0 / rho
    r = kernels.radius(x, v, n)
    state = LagrangianState(0.0, s, 0.0, M0, v, u, r, n)
    cmap = CoordinateMap(M0, init.profile.rho1, params.u_b, x.copy(), R0)
    return state, cmap


@dataclass(eq=False)
class Trajectory:
    snapshots: list
    cmap: CoordinateMap
    params: object
    profile: object
    cfg: SolverConfig
    B_times: list = field(default_factory=list)
    B_values: list = field(default_factory=list)
    rejected: int = 0

    @property
    def times(self):
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self):
        return self.snapshots[-1]

    def boundary_map(self):
        return self.cmap.with_boundary(self.B_times, self.B_values)


class Stepper:
    """Holds the per-run constants and advances states."""

    def __init__(self, params, profile, cfg, cmap):
        self.params = params
        self.profile = profile
        self.cfg = cfg
        self.cmap = cmap
        rho_m, u_m, *_ = sample_profile(profile, cfg.m)
        self.v_right = 1.0 / rho_m
        self.u_right = u_m
        self.out_rate = abs(params.u_b)
        self.M_rate = profile.rho1 * abs(params.u_b)

    def M(self, t):
        return self.cmap.M0 + self.M_rate * t

    def _grid(self, s, B, M):
        x = B + s * (M - B)
        x[0], x[-1] = B, M
        return x

    def _explicit(self, s, x, r, v, u):
        p = self.params
        B_rate = self.out_rate / v[0]
        w = B_rate + s * (self.M_rate - B_rate)
        # the inflow flux is boundary data, so it sits at r = m rather than at the quadrature radius
        r = r.copy()
        r[-1] = self.cfg.m
        ev, eu = kernels.explicit_terms(x, r, v, u, w, p.n, p.K, p.gamma)
        return ev, eu, B_rate

    def stable_dt(self, state):
        p = self.params
        x = state.x
        h = np.diff(x)
        dx = np.minimum(np.concatenate([[h[0]], h]), np.concatenate([h, [h[-1]]]))
        B_rate = self.out_rate / state.v[0]
        w = np.abs(B_rate + state.s * (self.M_rate - B_rate))
        rho = 1.0 / state.v
        c = np.sqrt(p.gamma * p.K * rho ** (p.gamma - 1.0))
        speed = w + state.r ** (p.n - 1) * rho * c + 1e-300
        return self.cfg.cfl * float(np.min(dx / speed))

    def _check(self, v, stage):
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise PositivityLossError("specific volume lost positivity", stage=stage)

    def _advance(self, state, dt):
        if self.cfg.scheme == "theta":
            return self._theta_step(state, dt)
        return self._imex_step(state, dt)

    def _theta_step(self, state, dt):
        p = self.params
        th = self.cfg.theta
        s, v, u, r = state.s, state.v, state.u, state.r
        x = state.x
        lo, di, up = kernels.viscous_coeffs(x, r, v, p.n, p.mu)
        ev, eu, B_rate = self._explicit(s, x, r, v, u)
        rhs = u + dt * eu
        if th < 1.0:
            rhs = rhs + (1.0 - th) * dt * kernels.apply_tridiag(lo, di, up, u)
        u_new = kernels.solve_shifted(lo, di, up, rhs, th * dt, p.u_b, self.u_right)
        # continuity with the updated velocity
        ev_new, _, _ = self._explicit(s, x, r, v, u_new)
        v_new = v + dt * ev_new
        v_new[-1] = self.v_right
        self._check(v_new, "theta")
        B_new = state.B + dt * self.out_rate * (th / v_new[0] + (1.0 - th) / v[0])
        t_new = state.t + dt
        x_new = self._grid(s, B_new, self.M(t_new))
        r_new = kernels.radius(x_new, v_new, p.n)
        return LagrangianState(t_new, s, B_new, self.M(t_new), v_new, u_new, r_new, p.n,
                               state.steps + 1)

    def _imex_step(self, state, dt):
        p = self.params
        g, d = _ARS_G, _ARS_D
        s = state.s
        v1, u1, B1 = state.v, state.u, state.B
        ev1, eu1, eB1 = self._explicit(s, state.x, state.r, v1, u1)

        t2 = state.t + g * dt
        v2 = v1 + g * dt * ev1
        v2[-1] = self.v_right
        self._check(v2, "imex-2")
        B2 = B1 + g * dt * eB1
        x2 = self._grid(s, B2, self.M(t2))
        r2 = kernels.radius(x2, v2, p.n)
        lo2, di2, up2 = kernels.viscous_coeffs(x2, r2, v2, p.n, p.mu)
        u2 = kernels.solve_shifted(lo2, di2, up2, u1 + g * dt * eu1, g * dt, p.u_b, self.u_right)
        ev2, eu2, eB2 = self._explicit(s, x2, r2, v2, u2)

        t3 = state.t + dt
        v3 = v1 + dt * (d * ev1 + (1.0 - d) * ev2)
        v3[-1] = self.v_right
        self._check(v3, "imex-3")
        B3 = B1 + dt * (d * eB1 + (1.0 - d) * eB2)
        x3 = self._grid(s, B3, self.M(t3))
        r3 = kernels.radius(x3, v3, p.n)
        lo3, di3, up3 = kernels.viscous_coeffs(x3, r3, v3, p.n, p.mu)
        rhs = u1 + dt * (d * eu1 + (1.0 - d) * eu2) + (1.0 - g) * dt * kernels.apply_tridiag(lo2, di2, up2, u2)
        u3 = kernels.solve_shifted(lo3, di3, up3, rhs, g * dt, p.u_b, self.u_right)
        if not np.all(np.isfinite(u3)):
            raise NumericalError("tridiagonal solve produced non-finite values")
        return LagrangianState(t3, s, B3, self.M(t3), v3, u3, r3, p.n, state.steps + 1)

    def step(self, state, dt=None):
        """One accepted step; halves dt on positivity loss up to max_retries."""
        if dt is None:
            dt = self.cfg.dt if self.cfg.dt is not None else self.stable_dt(state)
        rejected = 0
        while True:
            try:
                return self._advance(state, dt), dt, rejected
            except PositivityLossError:
                rejected += 1
                if rejected > self.cfg.max_retries:
                    raise PositivityLossError("positivity lost after repeated step halving",
                                              t=state.t, dt=dt)
                dt *= 0.5


def step(state, cfg, stepper, dt=None):
    new, _, _ = stepper.step(state, dt)
    return new


def evolve(state, t_end, cfg, stepper, hooks=()):
    """Advance to ``t_end`` storing every ``cfg.stride``-th state and the final one.

    Every step is stored while t <= ``cfg.dense_until`` so that fast initial
    layers are resolved by the time quadratures of the diagnostics.
    """
    if t_end < state.t:
        raise RangeError("t_end precedes the current time", t_end=t_end, t=state.t)
    traj = Trajectory([state], stepper.cmap, stepper.params, stepper.profile, cfg,
                      [state.t], [state.B])
    _run_hooks(hooks, state)
    count = 0
    eps = 1e-12 * max(1.0, t_end)
    while state.t < t_end - eps:
        dt = cfg.dt if cfg.dt is not None else stepper.stable_dt(state)
        if state.t + dt > t_end - eps:
            dt = t_end - state.t
        state, _, rej = stepper.step(state, dt)
        traj.rejected += rej
        traj.B_times.append(state.t)
        traj.B_values.append(state.B)
        count += 1
        if count % cfg.stride == 0 or state.t >= t_end - eps or state.t <= cfg.dense_until:
            traj.snapshots.append(state)
            _run_hooks(hooks, state)
    return traj


def _run_hooks(hooks, state):
    for hook in hooks:
        try:
            hook(state)
        except OutflowError:
            raise
        except Exception as exc:
            raise NumericalError(f"snapshot hook failed: {exc!r}", t=state.t) from exc


def make_stepper(params, profile, cfg, cmap):
    return Stepper(params, profile, cfg, cmap)


def with_config(cfg, **changes):
    return replace(cfg, **changes)
