"""Pure numpy implementations of the per-stage kernels.

The compiled extension mirrors these signatures exactly; ``kernels`` picks
whichever is available.
"""

import numpy as np
from scipy.linalg import solve_banded


def radius(x, v, n):
    vol = np.zeros_like(v)
    vol[1:] = np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(x))
    r = (1.0 + n * vol) ** (1.0 / n)
    r[0] = 1.0
    return r


def _upwind(f, x):
    # second-order one-sided difference looking toward larger x; central at N-2
    out = np.zeros_like(f)
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    out[:-2] = (-(2 * h1 + h2) / (h1 * (h1 + h2)) * f[:-2] + (h1 + h2) / (h1 * h2) * f[1:-1]
                - h1 / (h2 * (h1 + h2)) * f[2:])
    a, b = h1[-1], h2[-1]
    out[-2] = -b / (a * (a + b)) * f[-3] + (b - a) / (a * b) * f[-2] + a / (b * (a + b)) * f[-1]
    return out


def _central(f, x):
    out = np.zeros_like(f)
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    out[1:-1] = (-h2 / (h1 * (h1 + h2)) * f[:-2] + (h2 - h1) / (h1 * h2) * f[1:-1]
                 + h1 / (h2 * (h1 + h2)) * f[2:])
    a, b = h1[0], h2[0]
    out[0] = -(2 * a + b) / (a * (a + b)) * f[0] + (a + b) / (a * b) * f[1] - a / (b * (a + b)) * f[2]
    return out


def _volume_rate(x, g, v, w):
    # flux form: H_i dv_i/dt = F_{i+1/2} - F_{i-1/2} - H_i w_x v_i with F = g + w v,
    # so the trapezoid volume changes only by the end fluxes; v at the right end is held fixed
    N = x.size
    h = np.diff(x)
    H = np.empty(N)
    H[0] = 0.5 * h[0]
    H[1:-1] = 0.5 * (h[:-1] + h[1:])
    H[-1] = 0.5 * h[-1]
    wx = (w[-1] - w[0]) / (x[-1] - x[0])
    # upwind side is the larger index; second order except next to the fixed end
    vs = v[1:].copy()
    vs[:-2] += (v[1:-2] - v[2:-1]) * h[:-2] / (2.0 * h[1:-1])
    F = 0.5 * (g[:-1] + g[1:]) + 0.5 * (w[:-1] + w[1:]) * vs
    F[-1] = g[-1] + w[-1] * v[-1] - H[-1] * wx * v[-1]
    ev = np.zeros(N)
    ev[0] = (F[0] - g[0] - w[0] * v[0]) / H[0] - wx * v[0]
    ev[1:-1] = (F[1:] - F[:-1]) / H[1:-1] - wx * v[1:-1]
    return ev


def explicit_terms(x, r, v, u, w, n, K, gamma):
    """Explicit parts of dv/dt and du/dt at the nodes (ends set to zero where Dirichlet)."""
    rn1 = r ** (n - 1)
    ev = _volume_rate(x, rn1 * u, v, w)
    p = K * v ** (-gamma)
    eu = -rn1 * _central(p, x) + w * _upwind(u, x)
    eu[0] = 0.0
    eu[-1] = 0.0
    return ev, eu


def viscous_coeffs(x, r, v, n, mu):
    """Tridiagonal coefficients of mu r^(n-1) ((r^(n-1) u)_x / v)_x at interior nodes."""
    rn1 = r ** (n - 1)
    h = np.diff(x)
    vh = 0.5 * (v[1:] + v[:-1])
    k = 1.0 / (h * vh)
    c = mu * rn1[1:-1] * 2.0 / (h[:-1] + h[1:])
    lo = np.zeros_like(v)
    di = np.zeros_like(v)
    up = np.zeros_like(v)
    lo[1:-1] = c * rn1[:-2] * k[:-1]
    up[1:-1] = c * rn1[2:] * k[1:]
    di[1:-1] = -c * rn1[1:-1] * (k[:-1] + k[1:])
    return lo, di, up


def apply_tridiag(lo, di, up, u):
    out = di * u
    out[1:] += lo[1:] * u[:-1]
    out[:-1] += up[:-1] * u[1:]
    return out


def solve_shifted(lo, di, up, rhs, coef, left, right):
    """Solve (I - coef L) u = rhs on interior nodes with Dirichlet ends."""
    N = rhs.size
    ab = np.zeros((3, N))
    ab[1] = 1.0 - coef * di
    ab[0, 1:] = -coef * up[:-1]
    ab[2, :-1] = -coef * lo[1:]
    b = rhs.astype(float).copy()
    ab[1, 0] = ab[1, -1] = 1.0
    ab[0, 1] = 0.0
    ab[2, -2] = 0.0
    b[0], b[-1] = left, right
    return solve_banded((1, 1), ab, b, check_finite=False)
