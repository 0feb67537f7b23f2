"""Thermodynamic closure and the convex energy functions.

Pressure is P(rho) = K rho**gamma in Eulerian variables and
p(v) = K v**(-gamma) in the Lagrangian specific volume v = 1/rho. The energy
distance between volumes is

    G(v, vt) = integral over z in [1/vt, 1/v] of (p(1/z) - p(vt)) / z**2 dz,

which equals vt p(vt) g(v/vt) with g(s) = s - 1 - int_1^s eta**(-gamma).
All functions accept scalars or numpy arrays.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import exprel

from .errors import DomainError, PreconditionError
from .quadrature import integrate_batch

BOUND_SLACK = 1e-8
_SERIES_RADIUS = 0.05
_SERIES_TERMS = 16


@dataclass(frozen=True)
class Params:
    """Physical constants of the outflow problem.

    ``u_b = 0`` is accepted as the degenerate no-flow case. ``gamma`` above 2
    is representable so the precondition of :func:`check_phiG_bound` can be
    exercised; the configuration layer rejects it.
    """

    n: int = 2
    gamma: float = 1.4
    K: float = 1.0
    mu: float = 1.0
    rho_plus: float = 1.0
    u_b: float = -0.05

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2", n=self.n)
        object.__setattr__(self, "n", int(self.n))
        if not self.gamma >= 1.0:
            raise DomainError("gamma must be >= 1", gamma=self.gamma)
        for name in ("K", "mu", "rho_plus"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive", **{name: getattr(self, name)})
        if not self.u_b <= 0:
            raise DomainError("u_b must be <= 0 (outflow)", u_b=self.u_b)


def _positive(name, x):
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} must be positive")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def pressure_eulerian(rho, params):
    rho = _positive("rho", rho)
    return _out(params.K * rho ** params.gamma)


def pressure_lagrangian(v, params):
    v = _positive("v", v)
    return _out(params.K * v ** (-params.gamma))


def _g_series_coeffs(gamma):
    # g(1+d) = sum_k c_k d^k, c_k = (-1)^k gamma(gamma+1)...(gamma+k-2)/k!
    c = np.zeros(_SERIES_TERMS + 1)
    poch, fact = 1.0, 1.0
    for k in range(2, _SERIES_TERMS + 1):
        poch *= gamma + k - 2
        fact *= k
        c[k] = (-1) ** k * poch / fact
    return c


def _h_series_coeffs(gamma):
    # h(1+d) = sum_k binom(gamma, k) d^k for gamma > 1;
    # s log s - s + 1 = sum_k (-1)^k d^k / (k(k-1)) for gamma = 1
    c = np.zeros(_SERIES_TERMS + 1)
    if gamma == 1:
        for k in range(2, _SERIES_TERMS + 1):
            c[k] = (-1) ** k / (k * (k - 1))
        return c
    binom = gamma
    for k in range(2, _SERIES_TERMS + 1):
        binom *= (gamma - k + 1) / k
        c[k] = binom / (gamma - 1)
    return c


def _poly(c, d):
    acc = np.zeros_like(d)
    for ck in c[:0:-1]:
        acc = (acc + ck) * d
    return acc


def _g_raw(d, gamma):
    # argument is d = s - 1, kept separate so callers can form it exactly
    s = 1.0 + d
    with np.errstate(invalid="ignore", divide="ignore"):
        if gamma == 1:
            far = d - np.log(s)
        else:
            far = d + np.expm1((1.0 - gamma) * np.log(s)) / (gamma - 1.0)
    near = _poly(_g_series_coeffs(gamma), d)
    return np.where(np.abs(d) < _SERIES_RADIUS, near, far)


def normalized_g(s, gamma):
    """g(s) = s - 1 - int_1^s eta^(-gamma) d eta, evaluated without cancellation."""
    s = _positive("s", s)
    return _out(_g_raw(s - 1.0, gamma))


def energy_distance_G(v, vt, params, mode="closed", atol=1e-10):
    """G(v, vt) in closed form (default) or by adaptive quadrature."""
    v = _positive("v", v)
    vt = _positive("vt", vt)
    v, vt = np.broadcast_arrays(v, vt)
    if mode == "quadrature":
        val = _G_quadrature(v.ravel(), vt.ravel(), params, atol).reshape(v.shape)
    elif mode == "closed":
        scale = params.K * vt ** (1.0 - params.gamma)
        val = scale * _g_raw((v - vt) / vt, params.gamma)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _out(val)


def _G_quadrature(v, vt, params, atol):
    # z = (1 + tau)/vt turns the integrand into pt vt expm1(gamma log1p tau)/(1+tau)^2
    gamma = params.gamma
    w = params.K * vt ** (1.0 - gamma)

    def f(tau, owner):
        return w[owner][:, None] * np.expm1(gamma * np.log1p(tau)) / (1.0 + tau) ** 2

    val, _ = integrate_batch(f, np.zeros_like(v), (vt - v) / v, atol=atol)
    return val


def normalized_g_quadrature(s, gamma, atol=1e-10):
    s = np.atleast_1d(_positive("s", s)).astype(float)
    val, _ = integrate_batch(lambda z, owner: z ** (-gamma), np.ones_like(s), s, atol=atol)
    return s - 1.0 - val


def energy_density(u, ut, v, vt, params):
    u = np.asarray(u, dtype=float)
    ut = np.asarray(ut, dtype=float)
    return _out(0.5 * (u - ut) ** 2 + np.asarray(energy_distance_G(v, vt, params)))


def relative_entropy_H(rho, sigma, params):
    """H(rho, sigma) = rho G(1/rho, 1/sigma) through its closed forms."""
    rho = _positive("rho", rho)
    sigma = _positive("sigma", sigma)
    K, gamma = params.K, params.gamma
    d = (rho - sigma) / sigma
    s = 1.0 + d
    scale = K * sigma ** gamma
    with np.errstate(invalid="ignore", divide="ignore"):
        # (s^gamma - 1 - gamma d)/(gamma - 1) = s log(s) exprel((gamma - 1) log s) - d, exact at gamma = 1
        log_s = np.log(s)
        far = scale * (s * log_s * exprel((gamma - 1.0) * log_s) - d)
    near = scale * _poly(_h_series_coeffs(gamma), d)
    val = np.where(np.abs(d) < _SERIES_RADIUS, near, far)
    return _out(val)


def phiG_bound_terms(v, vt, params, G=None):
    """Vectorized sides of the two-branch lower bound for G.

    Returns ``(branch_le, lhs, rhs)`` where ``branch_le`` is True where v <= vt.
    """
    gamma = params.gamma
    if not 1.0 <= gamma <= 2.0:
        raise PreconditionError("the lower bound for G needs 1 <= gamma <= 2", gamma=gamma)
    v = _positive("v", v)
    vt = _positive("vt", vt)
    if G is None:
        G = np.asarray(energy_distance_G(v, vt, params))
    lhs = 0.5 * gamma * params.K * (v - vt) ** 2
    le = v <= vt
    rhs = np.where(le, vt ** (1.0 + gamma) * G, vt ** gamma * v * G)
    return le, lhs, rhs


def check_phiG_bound(v, vt, params):
    le, lhs, rhs = phiG_bound_terms(v, vt, params)
    lhs, rhs = float(lhs), float(rhs)
    return {
        "branch": "v<=vt" if bool(le) else "v>vt",
        "lhs": lhs,
        "rhs": rhs,
        "holds": lhs <= rhs * (1.0 + BOUND_SLACK) + 1e-300,
    }
