"""Lagrangian mass coordinates for the moving domain [B(t), M(t)].

The mass coordinate of radius r is X(r,t) = B(t) + int_1^r rho y^(n-1) dy and
the inverse is R(x,t) = (1 + n int_B^x v dy)^(1/n). On a snapshot the
specific volume is taken piecewise linear in x, so r^n is piecewise
quadratic and X is its exact inverse; at nodes both reduce to the composite
trapezoid rule.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MissingDataError, RangeError


@dataclass(frozen=True, eq=False)
class MassGrid:
    t: float
    s: np.ndarray
    B: float
    M: float

    @property
    def x(self):
        x = self.B + self.s * (self.M - self.B)
        x[0], x[-1] = self.B, self.M
        return x

    @property
    def widths(self):
        return np.diff(self.x)


@dataclass(frozen=True, eq=False)
class LagrangianState:
    """Solver state on the normalized grid.

    ``r`` is always the radius recomputed from ``v`` on the current grid.
    """

    t: float
    s: np.ndarray
    B: float
    M: float
    v: np.ndarray
    u: np.ndarray
    r: np.ndarray
    n: int
    steps: int = 0

    def __post_init__(self):
        for name in ("s", "v", "u", "r"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def grid(self):
        return MassGrid(self.t, self.s, self.B, self.M)

    @property
    def x(self):
        x = self.B + self.s * (self.M - self.B)
        x[0], x[-1] = self.B, self.M
        return x

    @property
    def N(self):
        return self.s.size

    def perturbation(self, profile):
        """phi = v - vt(R(x,t)), psi = u - ut(R(x,t))."""
        from .stationary import sample_profile

        rho_t, u_t, *_ = sample_profile(profile, np.minimum(self.r, profile.r_max))
        return self.v - 1.0 / rho_t, self.u - u_t


@dataclass(frozen=True, eq=False)
class CoordinateMap:
    """Boundary curves and the initial inverse map.

    ``B_times``/``B_values`` hold the accumulated outflow as produced by the
    solver; ``x0``/``r0`` tabulate R_0 on the initial mass grid.
    """

    M0: float
    rho1: float
    u_b: float
    x0: np.ndarray
    r0: np.ndarray
    B_times: tuple = (0.0,)
    B_values: tuple = (0.0,)

    @property
    def slope(self):
        return self.rho1 * abs(self.u_b)

    def M(self, t):
        return outer_mass_M(self, t)

    def B(self, t):
        return float(np.interp(t, self.B_times, self.B_values))

    def R0(self, x):
        return np.interp(x, self.x0, self.r0)

    def with_boundary(self, times, values):
        return CoordinateMap(self.M0, self.rho1, self.u_b, self.x0, self.r0,
                             tuple(float(t) for t in times), tuple(float(b) for b in values))


def outer_mass_M(cmap, t):
    if np.any(np.asarray(t) < 0):
        raise RangeError("time must be nonnegative", t=t)
    return cmap.M0 + cmap.rho1 * abs(cmap.u_b) * t


def cumulative_trapezoid(y, x):
    out = np.zeros(np.shape(y))
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def mass_coordinate_X(r_nodes, rho_nodes, r, B_t, n):
    """X(r) = B_t + int_1^r rho y^(n-1) dy for a nodal Eulerian density.

    The integrand rho y^(n-1) is interpolated linearly, which makes X exact at
    nodes for the composite trapezoid rule and strictly increasing.
    """
    r_nodes = np.asarray(r_nodes, dtype=float)
    rho_nodes = np.asarray(rho_nodes, dtype=float)
    if np.any(rho_nodes <= 0):
        raise DomainError("density must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < r_nodes[0]) or np.any(r > r_nodes[-1]):
        raise RangeError("radius outside the density field")
    g = rho_nodes * r_nodes ** (n - 1)
    cum = cumulative_trapezoid(g, r_nodes)
    i = np.clip(np.searchsorted(r_nodes, r, side="right") - 1, 0, r_nodes.size - 2)
    h = r_nodes[i + 1] - r_nodes[i]
    d = r - r_nodes[i]
    val = B_t + cum[i] + g[i] * d + (g[i + 1] - g[i]) * d * d / (2.0 * h)
    return float(val) if val.ndim == 0 else val


def radius_R(x_nodes, v_nodes, x, B_t, n):
    """R(x) = (1 + n int_B^x v)^(1/n) for piecewise-linear v on the mass grid."""
    x_nodes = np.asarray(x_nodes, dtype=float)
    v_nodes = np.asarray(v_nodes, dtype=float)
    if np.any(v_nodes <= 0):
        raise DomainError("specific volume must be positive")
    x = np.asarray(x, dtype=float)
    span = x_nodes[-1] - x_nodes[0]
    if np.any(x < B_t - 1e-14 * span) or np.any(x > x_nodes[-1] + 1e-14 * span):
        raise RangeError("mass coordinate outside [B(t), M(t)]")
    x = np.clip(x, x_nodes[0], x_nodes[-1])
    cum = cumulative_trapezoid(v_nodes, x_nodes)
    i = np.clip(np.searchsorted(x_nodes, x, side="right") - 1, 0, x_nodes.size - 2)
    h = x_nodes[i + 1] - x_nodes[i]
    d = x - x_nodes[i]
    vol = cum[i] + v_nodes[i] * d + (v_nodes[i + 1] - v_nodes[i]) * d * d / (2.0 * h)
    val = (1.0 + n * vol) ** (1.0 / n)
    val = np.where(x == x_nodes[0], 1.0, val)
    return float(val) if val.ndim == 0 else val


def mass_from_radius(x_nodes, v_nodes, r, n):
    """Exact inverse of :func:`radius_R` on the same discrete field."""
    x_nodes = np.asarray(x_nodes, dtype=float)
    v_nodes = np.asarray(v_nodes, dtype=float)
    r = np.asarray(r, dtype=float)
    cum = cumulative_trapezoid(v_nodes, x_nodes)
    target = (r ** n - 1.0) / n
    if np.any(target < -1e-15) or np.any(target > cum[-1] * (1 + 1e-14)):
        raise RangeError("radius outside the Lagrangian domain")
    i = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, x_nodes.size - 2)
    h = x_nodes[i + 1] - x_nodes[i]
    a = (v_nodes[i + 1] - v_nodes[i]) / (2.0 * h)
    b = v_nodes[i]
    c = np.maximum(target - cum[i], 0.0)
    # root of a d^2 + b d - c = 0 in the cancellation-free form
    d = 2.0 * c / (b + np.sqrt(b * b + 4.0 * a * c))
    val = x_nodes[i] + d
    return float(val) if val.ndim == 0 else val


def fd_first(f, x):
    """Second-order first derivative on a nonuniform grid (one-sided at ends)."""
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    out[1:-1] = (-h2 / (h1 * (h1 + h2)) * f[:-2] + (h2 - h1) / (h1 * h2) * f[1:-1]
                 + h1 / (h2 * (h1 + h2)) * f[2:])
    a, b = x[1] - x[0], x[2] - x[1]
    out[0] = (-(2 * a + b) / (a * (a + b)) * f[0] + (a + b) / (a * b) * f[1] - a / (b * (a + b)) * f[2])
    a, b = x[-1] - x[-2], x[-2] - x[-3]
    out[-1] = ((2 * a + b) / (a * (a + b)) * f[-1] - (a + b) / (a * b) * f[-2] + a / (b * (a + b)) * f[-3])
    return out


def fd_second(f, x):
    """Three-point second derivative; ends copy their neighbours."""
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    out[1:-1] = 2.0 * (f[:-2] / (h1 * (h1 + h2)) - f[1:-1] / (h1 * h2) + f[2:] / (h2 * (h1 + h2)))
    out[0], out[-1] = out[1], out[-2]
    return out


def verify_coordinate_identities(state, previous=None, check_rt=False):
    """Deviations of R_x from r^(1-n) v and, across two snapshots, of R_t from u.

    The R_t check compares the radius of each current node's particle at both
    times, using the time-centered velocity.
    """
    n = state.n
    x = state.x
    rx = fd_first(state.r, x)
    dev_rx = float(np.max(np.abs(rx - state.r ** (1 - n) * state.v)))
    report = {"t": state.t, "R_x": dev_rx, "R_t": None}
    if check_rt or previous is not None:
        if previous is None:
            raise MissingDataError("R_t check needs two snapshots")
        dt = state.t - previous.t
        xp = previous.x
        inside = (x >= xp[0]) & (x <= xp[-1])
        if dt <= 0 or not np.any(inside):
            report["R_t"] = 0.0
            return report
        r_prev = radius_R(xp, previous.v, x[inside], previous.B, n)
        u_prev = np.interp(x[inside], xp, previous.u)
        rt = (state.r[inside] - r_prev) / dt
        report["R_t"] = float(np.max(np.abs(rt - 0.5 * (state.u[inside] + u_prev))))
    return report


def annulus_mass(state, m):
    """B(t) + int_1^m rho r^(n-1) dr on a snapshot.

    When the outer node sits inside r = m the last cell's volume is extended
    with the boundary value of v.
    """
    x, v, n = state.x, state.v, state.n
    r_M = float(state.r[-1])
    if m <= r_M:
        return float(mass_from_radius(x, v, m, n))
    return float(x[-1] + (m ** n - r_M ** n) / (n * v[-1]))
