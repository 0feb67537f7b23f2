"""Stationary outflow profile on a truncated ray [1, R_max].

With the mass flux b = rho1 * u_b fixed, the velocity is slaved to the
density, u = b r^(1-n) / rho, and the density solves

    rho'' + a1 rho'^2 + a2 rho' + a3 = 0,
    a1 = -2/rho,
    a2 = r^(n-1) rho P'(rho) / (mu b) - b / (mu r^(n-1)) - (n-1)/r,
    a3 = -(n-1) b rho / (mu r^n).

For large r the coefficient a2 is large and negative, so marching from the
far field inward is the stable direction. The system y = (rho, rho') is
integrated with variable-step BDF2 (L-stable, second order) from R_max to 1;
each node is a small damped Newton solve. The nonlocal coefficient
rho1 = rho(1) is found by an outer fixed-point iteration started at rho_plus.

The far-field value is taken from the leading-order tail,
rho(R) = rho_plus - rho'(R) R / (2n - 2), with rho'(R) on the slow manifold
a2 rho' + a3 ~ 0. Setting rho(R) = rho_plus instead would shift
rho_plus - rho by a constant of the same order as the tail itself.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import InsufficientDataError, NonConvergenceError, ParameterRegimeError, RangeError

PROFILE_HEADER = ("r", "rho_t", "u_t", "drho", "du", "ddrho")


@dataclass(frozen=True, eq=False)
class StationaryProfile:
    params: object
    r: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    drho: np.ndarray
    du: np.ndarray
    ddrho: np.ndarray
    rho1: float
    flux: float
    newton_residual: float = 0.0
    outer_iterations: int = 0
    far_field_gap: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def r_max(self):
        return float(self.r[-1])

    @cached_property
    def _interp(self):
        rho_spline = CubicHermiteSpline(self.r, self.rho, _monotone_slopes(self.r, self.rho, self.drho))
        return (
            rho_spline,
            CubicHermiteSpline(self.r, self.drho, self.ddrho),
            PchipInterpolator(self.r, self.du),
            PchipInterpolator(self.r, self.ddrho),
        )

    @cached_property
    def _f_table(self):
        # f(r) = rho1 |u_b| int_1^r vt'(s) s^(2-2n) ds on the profile grid
        n = self.params.n
        vt_r = -self.drho / self.rho ** 2
        integrand = self.rho1 * abs(self.params.u_b) * vt_r / self.r ** (2 * n - 2)
        return _cumtrapz(integrand, self.r)

    def rows(self):
        return np.column_stack([self.r, self.rho, self.u, self.drho, self.du, self.ddrho])

    def f_function(self, r):
        """The auxiliary f(r) used by the representation formulas."""
        r = _check_range(self, r)
        return np.interp(r, self.r, self._f_table)


def _monotone_slopes(x, y, dy):
    # Fritsch-Carlson limiter applied to supplied derivatives
    dy = dy.copy()
    h = np.diff(x)
    delta = np.diff(y) / h
    for i, dk in enumerate(delta):
        if dk == 0.0:
            dy[i] = dy[i + 1] = 0.0
            continue
        a, b = dy[i] / dk, dy[i + 1] / dk
        if a < 0:
            dy[i] = 0.0
            a = 0.0
        if b < 0:
            dy[i + 1] = 0.0
            b = 0.0
        rad = a * a + b * b
        if rad > 9.0:
            tau = 3.0 / np.sqrt(rad)
            dy[i] = tau * a * dk
            dy[i + 1] = tau * b * dk
    return dy


def _cumtrapz(y, x):
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def _check_range(profile, r):
    r = np.asarray(r, dtype=float)
    lo, hi = profile.r[0], profile.r[-1]
    tol = 1e-12 * hi
    if np.any(r < lo - tol) or np.any(r > hi + tol):
        raise RangeError("radius outside the profile range", r_min=float(np.min(r)), r_max=float(np.max(r)))
    return np.clip(r, lo, hi)


def sample_profile(profile, r):
    """Interpolated (rho_t, u_t, drho, du, ddrho) at radius r.

    rho_t uses a monotone cubic Hermite interpolant built on the stored
    derivative; u_t is then recovered from the flux relation, so the flux
    identity holds at every sampled point.
    """
    scalar = np.ndim(r) == 0
    r = _check_range(profile, r)
    rho_s, drho_s, du_s, ddrho_s = profile._interp
    rho = rho_s(r)
    n = profile.params.n
    u = profile.flux * r ** (1 - n) / rho
    out = [np.atleast_1d(np.asarray(o, dtype=float)).copy()
           for o in (rho, u, drho_s(r), du_s(r), ddrho_s(r))]
    # nodes reproduce stored values exactly
    rr = np.atleast_1d(r)
    idx = np.clip(np.searchsorted(profile.r, rr), 0, profile.r.size - 1)
    hit = profile.r[idx] == rr
    stored = (profile.rho, profile.u, profile.drho, profile.du, profile.ddrho)
    for o, s in zip(out, stored):
        o[hit] = s[idx[hit]]
    if scalar:
        return tuple(float(o[0]) for o in out)
    return tuple(o.reshape(np.shape(r)) for o in out)


def _coefficients(params, rho1):
    n, K, gamma, mu, u_b = params.n, params.K, params.gamma, params.mu, params.u_b
    b = rho1 * u_b

    def rhs(r, rho, w):
        rn1 = r ** (n - 1)
        a2 = rn1 * K * gamma * rho ** gamma / (mu * b) - b / (mu * rn1) - (n - 1) / r
        a3 = -(n - 1) * b * rho / (mu * r * rn1)
        F = 2.0 * w * w / rho - a2 * w - a3
        da2 = rn1 * K * gamma * gamma * rho ** (gamma - 1) / (mu * b)
        da3 = -(n - 1) * b / (mu * r * rn1)
        dF_drho = -2.0 * w * w / rho ** 2 - da2 * w - da3
        dF_dw = 4.0 * w / rho - a2
        scale = 2.0 * w * w / rho + abs(a2 * w) + abs(a3)
        return F, dF_drho, dF_dw, a2, a3, scale

    return rhs


def _far_field(params, rhs, R):
    n = params.n
    rho = params.rho_plus
    w = 0.0
    for _ in range(6):
        _, _, _, a2, a3, _ = rhs(R, rho, 0.0)
        w = -a3 / (a2 - (2 * n - 1) / R)
        rho = params.rho_plus - w * R / (2 * n - 2)
    return rho, w


def _march(params, r, rho1, tol, max_newton):
    rhs = _coefficients(params, rho1)
    N = r.size
    rho = np.empty(N)
    w = np.empty(N)
    rho[-1], w[-1] = _far_field(params, rhs, r[-1])
    worst = 0.0
    for j in range(N - 2, -1, -1):
        hn = r[j + 1] - r[j]
        if j == N - 2:
            # backward Euler start
            beta, c1, c2 = 1.0, 1.0, 0.0
            ra, wa = rho[j + 1], w[j + 1]
        else:
            om = hn / (r[j + 2] - r[j + 1])
            den = 1.0 + 2.0 * om
            beta = (1.0 + om) / den
            c1 = (1.0 + om) ** 2 / den
            c2 = om * om / den
        # march in t = -r: y_j + beta h f(y_j) = c1 y_{j+1} - c2 y_{j+2}
        b_rho = c1 * rho[j + 1] - (c2 * rho[j + 2] if c2 else 0.0)
        b_w = c1 * w[j + 1] - (c2 * w[j + 2] if c2 else 0.0)
        bh = beta * hn
        # extrapolated guess
        if j < N - 2:
            ra = rho[j + 1] + (rho[j + 1] - rho[j + 2]) * om
            wa = w[j + 1] + (w[j + 1] - w[j + 2]) * om
        res = _node_residual(rhs, r[j], ra, wa, bh, b_rho, b_w)
        for _ in range(max_newton):
            g1, g2, j11, j12, j21, j22, scale = res
            if max(abs(g1) / params.rho_plus, abs(g2) / scale) <= tol:
                break
            det = j11 * j22 - j12 * j21
            d_rho = (g1 * j22 - g2 * j12) / det
            d_w = (j11 * g2 - j21 * g1) / det
            lam = 1.0
            norm0 = abs(g1) / params.rho_plus + abs(g2) / scale
            for _ in range(30):
                cand_rho = ra - lam * d_rho
                if cand_rho > 0:
                    trial = _node_residual(rhs, r[j], cand_rho, wa - lam * d_w, bh, b_rho, b_w)
                    if abs(trial[0]) / params.rho_plus + abs(trial[1]) / trial[6] < norm0 or lam < 1e-3:
                        break
                lam *= 0.5
            else:
                raise NonConvergenceError("damped Newton line search failed", residual=norm0, r=float(r[j]))
            ra, wa = cand_rho, wa - lam * d_w
            res = trial
        else:
            g1, g2, *_, scale = res
            raise NonConvergenceError("Newton did not converge at a node",
                                      residual=max(abs(g1) / params.rho_plus, abs(g2) / scale),
                                      r=float(r[j]))
        g1, g2, *_, scale = res
        worst = max(worst, abs(g1) / params.rho_plus, abs(g2) / scale)
        if not (np.isfinite(ra) and ra > 0):
            raise ParameterRegimeError("stationary density left the admissible range", residual=worst)
        rho[j], w[j] = ra, wa
    return rho, w, worst


def _node_residual(rhs, r, rho, w, bh, b_rho, b_w):
    F, dFr, dFw, _, _, scale = rhs(r, rho, w)
    g1 = rho + bh * w - b_rho
    g2 = w + bh * F - b_w
    return (g1, g2, 1.0, bh, bh * dFr, 1.0 + bh * dFw,
            abs(w) + bh * scale + abs(b_w) + 1e-300)


def geometric_mesh(r_max, N):
    """Geometric (log-uniform) nodes on [1, r_max], finest at r = 1."""
    r = np.exp(np.linspace(0.0, np.log(r_max), N))
    r[0], r[-1] = 1.0, float(r_max)
    return r


def solve_stationary(params, r_max=50.0, tol=1e-10, N=2000, max_outer=200, max_newton=40):
    """Solve for the stationary profile on [1, r_max]."""
    if r_max < 10:
        raise RangeError("r_max must be at least 10", r_max=r_max)
    if tol <= 0:
        raise RangeError("tol must be positive", tol=tol)
    r = geometric_mesh(r_max, N)
    n = params.n
    if params.u_b == 0:
        const = np.full(N, params.rho_plus)
        zero = np.zeros(N)
        return StationaryProfile(params, r, const, zero.copy(), zero.copy(), zero.copy(), zero.copy(),
                                 rho1=params.rho_plus, flux=0.0)
    rho1 = params.rho_plus
    prev_step = None
    for it in range(1, max_outer + 1):
        rho, w, resid = _march(params, r, rho1, tol, max_newton)
        new = rho[0]
        step = abs(new - rho1)
        if step <= tol * rho1:
            rho1 = new
            break
        if prev_step is not None and it > 5 and step > prev_step:
            raise ParameterRegimeError("outer fixed point on rho(1) diverges; |u_b| too large",
                                       residual=step, u_b=params.u_b)
        prev_step = step
        rho1 = new
    else:
        raise NonConvergenceError("outer fixed point on rho(1) did not converge", residual=step)
    # final march with the converged coefficient so rho[0] and rho1 agree
    rho, w, resid = _march(params, r, rho1, tol, max_newton)
    rho1 = float(rho[0])
    rhs = _coefficients(params, rho1)
    F = rhs(r, rho, w)[0]
    b = rho1 * params.u_b
    u = b * r ** (1 - n) / rho
    du = b * ((1 - n) * r ** (-n) / rho - r ** (1 - n) * w / rho ** 2)
    return StationaryProfile(params, r, rho, u, w, du, F, rho1=rho1, flux=b,
                             newton_residual=float(resid), outer_iterations=it,
                             far_field_gap=float(params.rho_plus - rho[-1]))


def ode_residual(profile):
    """Scaled residual of the profile ODE at interior nodes.

    rho'' is rebuilt by centered differences of the stored rho' (second
    differences of rho itself drown in roundoff far out, where rho is flat
    to 1e-10), so the result measures discretization error of the solve.
    """
    r, rho, w = profile.r, profile.rho, profile.drho
    params = profile.params
    if params.u_b == 0:
        return np.zeros(r.size - 2)
    h1 = r[1:-1] - r[:-2]
    h2 = r[2:] - r[1:-1]
    d2 = (-h2 / (h1 * (h1 + h2)) * w[:-2] + (h2 - h1) / (h1 * h2) * w[1:-1]
          + h1 / (h2 * (h1 + h2)) * w[2:])
    rhs = _coefficients(params, profile.rho1)
    rn, wn = rho[1:-1], w[1:-1]
    _, _, _, a2, a3, _ = rhs(r[1:-1], rn, wn)
    res = d2 - 2.0 * wn ** 2 / rn + a2 * wn + a3
    scale = np.abs(d2) + 2.0 * wn ** 2 / rn + np.abs(a2 * wn) + np.abs(a3)
    return res / scale


@dataclass(frozen=True)
class DecayReport:
    window: tuple
    n_fit_nodes: int
    slopes: dict
    targets: dict
    within: dict
    rho_increasing: bool
    rho_below_far_field: bool
    u_r_positive: bool
    flux_deviation: float
    defined: bool

    @property
    def passed(self):
        """Structural verdict; with u_b = 0 only flux consistency is required."""
        if not self.defined:
            return self.flux_deviation <= 1e-12
        return (all(self.within.values()) and self.rho_increasing and self.u_r_positive
                and self.flux_deviation <= 1e-8)

    def as_dict(self):
        return {
            "window": list(self.window),
            "n_fit_nodes": self.n_fit_nodes,
            "slopes": self.slopes,
            "targets": self.targets,
            "within": self.within,
            "rho_increasing": self.rho_increasing,
            "rho_below_far_field": self.rho_below_far_field,
            "u_r_positive": self.u_r_positive,
            "flux_deviation": self.flux_deviation,
            "slopes_defined": self.defined,
            "passed": self.passed,
        }


def stationary_report(profile, window=None, slope_tol=0.3, min_nodes=20):
    """Log-log decay slopes and structural verdicts of a stationary profile."""
    params = profile.params
    n = params.n
    r = profile.r
    if window is None:
        window = (profile.r_max / 5.0, 4.0 * profile.r_max / 5.0)
    sel = (r >= window[0]) & (r <= window[1])
    count = int(np.count_nonzero(sel))
    if count < min_nodes:
        raise InsufficientDataError("fit window holds too few nodes", nodes=count)
    targets = {"rho_gap": -(2.0 * n - 2), "drho": -(2.0 * n - 1), "du": -float(n), "ddrho": -2.0 * n}
    b = profile.flux
    dev = np.abs(r ** (n - 1) * profile.rho * profile.u - b)
    flux_dev = float(np.max(dev) / abs(b)) if b != 0 else float(np.max(dev))
    defined = params.u_b != 0
    slopes, within = {}, {}
    if defined:
        data = {
            "rho_gap": params.rho_plus - profile.rho,
            "drho": profile.drho,
            "du": profile.du,
            "ddrho": np.abs(profile.ddrho),
        }
        lr = np.log(r[sel])
        for key, vals in data.items():
            y = vals[sel]
            if np.all(y > 0):
                slope = float(np.polyfit(lr, np.log(y), 1)[0])
            else:
                slope = None
            slopes[key] = slope
            within[key] = slope is not None and abs(slope - targets[key]) <= slope_tol
    else:
        slopes = {k: None for k in targets}
        within = {k: None for k in targets}
    interior = slice(1, -1)
    return DecayReport(
        window=(float(window[0]), float(window[1])),
        n_fit_nodes=count,
        slopes=slopes,
        targets=targets,
        within=within,
        rho_increasing=bool(np.all(np.diff(profile.rho) > 0)) if defined else False,
        rho_below_far_field=bool(np.all(profile.rho < params.rho_plus)) if defined else False,
        u_r_positive=bool(np.all(profile.du[interior] > 0)) if defined else False,
        flux_deviation=flux_dev,
        defined=defined,
    )
