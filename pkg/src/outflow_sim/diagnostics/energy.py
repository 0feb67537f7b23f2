"""Energy balance and pointwise monitors."""

import numpy as np

from ..errors import InputError
from ..lagrangian import cumulative_trapezoid
from .fields import snapshot_fields, trap

SLACK = 1e-8


def energy_terms(snap, profile, params, fields=None):
    """All integrals of the energy balance at one snapshot.

    ``visc_half`` carries (n-1)/2 on the v psi^2 / r^2 term and ``visc_full``
    carries (n-1); ``source`` collects the remaining nonnegative sinks of the
    exact balance and ``forcing`` the term driven by the stationary profile.
    """
    f = fields if fields is not None else snapshot_fields(snap, profile, params)
    n, mu, gamma = params.n, params.mu, params.gamma
    ub = abs(params.u_b)
    x, r, v = f.x, f.r, f.v
    E = 0.5 * f.psi ** 2 + f.G
    grad = r ** (2 * n - 2) * f.psi_x ** 2 / v
    zero_order = (n - 1) * v * f.psi ** 2 / r ** 2
    rho_t, drho = f.rho_t, f.drho_t
    vt_r = -drho / rho_t ** 2
    vt_rr = -f.ddrho_t / rho_t ** 2 + 2.0 * drho ** 2 / rho_t ** 3
    L = mu * profile.flux * ((1 - n) * r ** (-n) * vt_r + r ** (1 - n) * vt_rr)
    sink_density = ((gamma - 1.0) * profile.rho1 * ub * drho / (r ** (n - 1) * rho_t ** 2) * f.G
                    + f.du_t * f.psi ** 2)
    return {
        "t": f.t,
        "energy": trap(E, x),
        "visc_full": mu * trap(grad + zero_order, x),
        "visc_half": mu * trap(grad + 0.5 * zero_order, x),
        "bdry": ub * f.G[0] / v[0],
        "sink_psi": ub * trap(f.psi ** 2 / r ** n, x),
        "sink_G": ub ** 3 * trap(f.G / r ** (3 * n - 2), x),
        "source": trap(sink_density, x),
        "forcing": trap(L * f.phi * f.psi, x),
        "sup_psi_w": float(np.max(r ** (n - 2) * f.psi ** 2)),
        "sobolev_rhs": trap(grad + zero_order, x),
        "v_min": float(np.min(v)),
        "v_max": float(np.max(v)),
    }


def energy_ledger(prev, nxt, profile, params, prev_terms=None, next_terms=None):
    """Discrete energy balance between consecutive snapshots.

    ``identity_residual`` is the defect of the exact balance
    dE/dt + bdry + visc_full + source - forcing = 0 with trapezoid time
    averaging; ``eps_disc`` = |residual| dt is the discretization allowance.
    ``violation`` is (E_next - E_prev) + dt (bdry + visc_half) averaged, the
    weaker inequality with the sinks dropped.
    """
    if nxt.t <= prev.t:
        raise InputError("snapshots must be consecutive in time")
    if prev.N != nxt.N or prev.n != nxt.n:
        raise InputError("snapshots come from different grids")
    a = prev_terms or energy_terms(prev, profile, params)
    b = next_terms or energy_terms(nxt, profile, params)
    dt = nxt.t - prev.t

    def avg(key):
        return 0.5 * (a[key] + b[key])

    dE = b["energy"] - a["energy"]
    residual = dE / dt + avg("bdry") + avg("visc_full") + avg("source") - avg("forcing")
    eps = abs(residual) * dt
    violation = dE + dt * (avg("bdry") + avg("visc_half"))
    scale = max(a["energy"], b["energy"], 1e-300)
    return {
        "t": nxt.t,
        "dt": dt,
        "dE": dE,
        "identity_residual": residual,
        "eps_disc": eps,
        "violation": violation,
        "violation_full": dE + dt * (avg("bdry") + avg("visc_full")),
        "holds": violation <= eps + SLACK * scale,
        "energy_nonincreasing": dE <= eps + SLACK * scale,
        "terms": b,
    }


def unit_window_bounds(x, v):
    """min and max of int_I v dx over unit-mass windows I inside [x_0, x_-1]."""
    if x[-1] - x[0] < 1.0:
        return None
    cum = cumulative_trapezoid(v, x)

    def vol(q):
        i = np.clip(np.searchsorted(x, q, side="right") - 1, 0, x.size - 2)
        h = x[i + 1] - x[i]
        d = q - x[i]
        return cum[i] + v[i] * d + (v[i + 1] - v[i]) * d * d / (2.0 * h)

    left = np.concatenate([x[x <= x[-1] - 1.0], x[x >= x[0] + 1.0] - 1.0])
    vals = vol(left + 1.0) - vol(left)
    return float(np.min(vals)), float(np.max(vals))


def pointwise_monitors(snap, profile, params, terms=None):
    """Sobolev sup bound, unit-window volumes and the boundary position."""
    t = terms or energy_terms(snap, profile, params)
    windows = unit_window_bounds(snap.x, snap.v)
    lhs, rhs = t["sup_psi_w"], t["sobolev_rhs"]
    return {
        "t": snap.t,
        "sup_psi_w": lhs,
        "sobolev_rhs": rhs,
        "sobolev_holds": lhs <= rhs * (1.0 + SLACK) + 1e-300,
        "window_min": None if windows is None else windows[0],
        "window_max": None if windows is None else windows[1],
        "window_notice": "domain shorter than one mass unit" if windows is None else None,
        "B": snap.B,
        "B_envelope": snap.B / (1.0 + abs(params.u_b) * snap.t),
    }


def boundary_growth(times, values, u_b, windows=4):
    """Affine envelope constant of B(t) and a super-linear growth flag.

    Slopes of B are fitted over dyadic windows [T/2^(k+1), T/2^k]; growth is
    flagged when the latest slope exceeds twice the earliest one.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    C0 = float(np.max(values / (1.0 + abs(u_b) * times)))
    T = times[-1]
    slopes = []
    for k in range(windows - 1, -1, -1):
        sel = (times >= T / 2 ** (k + 1)) & (times <= T / 2 ** k)
        if np.count_nonzero(sel) >= 3:
            slopes.append(float(np.polyfit(times[sel], values[sel], 1)[0]))
    superlinear = len(slopes) >= 2 and slopes[-1] > 2.0 * max(slopes[0], 1e-300)
    return {"C0": C0, "window_slopes": slopes, "superlinear": bool(superlinear)}
