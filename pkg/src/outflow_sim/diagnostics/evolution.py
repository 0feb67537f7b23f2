"""Effective velocity F, eta-weighted norms, decay functionals and the
convergence metric."""

import numpy as np

from ..cutoffs import eta_tilde
from ..errors import InputError, RangeError
from ..lagrangian import fd_first, fd_second, radius_R
from ..model import pressure_lagrangian
from ..stationary import sample_profile
from .fields import snapshot_fields, trap


def _F_parts(snap, profile, params, x_eval):
    """F and the right-hand side of its evolution equation at mass points."""
    n, mu, gamma, K = params.n, params.mu, params.gamma, params.K
    f = snapshot_fields(snap, profile, params)
    phi_x = fd_first(f.phi, f.x)
    F = mu * phi_x / f.v - f.psi / f.r ** (n - 1)
    r, v, rho, drho, ddrho = f.r, f.v, f.rho_t, f.drho_t, f.ddrho_t
    vt = 1.0 / rho
    dp = pressure_lagrangian(v, params) - pressure_lagrangian(vt, params)
    close = np.abs(f.phi) < 1e-10 * vt
    slope = np.where(close, -gamma * K * vt ** (-gamma - 1.0),
                     dp / np.where(close, 1.0, f.phi))
    h = drho / (r ** (n - 1) * rho ** 2)
    h_r = (ddrho / (r ** (n - 1) * rho ** 2) - (n - 1) * drho / (r ** n * rho ** 2)
           - 2.0 * drho ** 2 / (r ** (n - 1) * rho ** 3))
    Q = f.du_t + (n - 1) * f.u_t / r - (gamma * K / mu) * v ** (-gamma) + mu * r ** (n - 1) * h_r
    S = ((n - 1) * f.psi ** 2 / r ** n + gamma * slope * h * f.phi + Q * f.psi / r ** (n - 1)
         - (gamma * K / mu) * F / v ** gamma)
    return np.interp(x_eval, f.x, F), np.interp(x_eval, f.x, S), f


def F_norm(snap, profile, params, M0):
    """int_B^M0 r^(2n-2) F^2 dx (the whole domain if M0 is beyond it)."""
    n = params.n
    x = snap.x
    F, _, f = _F_parts(snap, profile, params, x)
    sel = x <= M0
    if np.count_nonzero(sel) < 2:
        return 0.0
    return trap(f.r[sel] ** (2 * n - 2) * F[sel] ** 2, x[sel])


def F_diagnostics(prev, nxt, profile, params, M0):
    """Weighted L2 norm of F on [B, M0] and the discrete residual of its evolution."""
    if nxt.t <= prev.t:
        raise InputError("snapshots must be consecutive in time")
    n = params.n
    x = nxt.x
    sel = (x >= max(prev.x[0], x[0])) & (x <= min(M0, prev.x[-1]))
    sel[0] = sel[-1] = False
    if np.count_nonzero(sel) < 3:
        raise RangeError("no interior nodes left of M0", t=nxt.t)
    xe = x[sel]
    F1, S1, f1 = _F_parts(nxt, profile, params, xe)
    F0, S0, _ = _F_parts(prev, profile, params, xe)
    dt = nxt.t - prev.t
    res = (F1 - F0) / dt - 0.5 * (S0 + S1)
    r = f1.r[sel]
    return {
        "t": nxt.t,
        "F_norm": trap(r ** (2 * n - 2) * F1 ** 2, xe),
        "residual_L2": float(np.sqrt(trap(res ** 2, xe))),
        "residual_max": float(np.max(np.abs(res))),
    }


def eta_weighted_norms(snap, profile, params, M0, delta=0.5):
    """eta-localized norms and the two sup bounds with their explicit constants."""
    if not delta > 0:
        raise RangeError("delta must be positive", delta=delta)
    n = params.n
    f = snapshot_fields(snap, profile, params)
    x, r, v, psi = f.x, f.r, f.v, f.psi
    if not (x[0] <= M0 <= x[-1]):
        raise RangeError("M0 outside the current domain", t=snap.t)
    r_M0 = radius_R(x, v, M0, x[0], n)
    eta = eta_tilde(r - r_M0)
    psi_x = f.psi_x
    psi_xx = fd_second(psi, x)
    v_max = float(np.max(v))
    grad = trap(r ** (2 * n - 2) * psi_x ** 2, x)
    root8 = np.sqrt(8.0)
    Ca = (root8 + 3 * n - 4 + 1.0 / delta) * v_max
    Cb = (root8 + 3 * n - 3 + 1.0 / delta) * v_max
    lhs_a = float(np.max(eta * r ** (3 * n - 4) * psi_x ** 2))
    lhs_b = float(np.max(eta * r ** (3 * n - 3) * psi_x ** 2))
    rhs_a = Ca * grad + delta * trap(eta * r ** (4 * n - 6) * psi_xx ** 2 / v, x)
    rhs_b = Cb * grad + delta * trap(eta * r ** (4 * n - 4) * psi_xx ** 2 / v, x)
    return {
        "t": snap.t,
        "delta": delta,
        "norm_2n4": trap(eta * r ** (2 * n - 4) * psi_x ** 2, x),
        "norm_2n2": trap(eta * r ** (2 * n - 2) * psi_x ** 2, x),
        "sup_psi": float(np.max(eta * r ** (n - 1) * psi ** 2)),
        "sup_a": lhs_a, "bound_a": rhs_a, "holds_a": lhs_a <= rhs_a * (1 + 1e-8),
        "sup_b": lhs_b, "bound_b": rhs_b, "holds_b": lhs_b <= rhs_b * (1 + 1e-8),
    }


def _eulerian(snap, profile):
    r = snap.r
    rho = 1.0 / snap.v
    rho_t, u_t, *_ = sample_profile(profile, np.minimum(r, profile.r_max))
    return r, rho, snap.u, rho_t, u_t


def decay_values(snap, profile, params):
    n = params.n
    r, rho, u, rho_t, u_t = _eulerian(snap, profile)
    d = fd_first(rho - rho_t, r)
    return {
        "I1": trap((u - u_t) ** 2 / r ** (n - 1), r),
        "J1": float((rho[0] - profile.rho1) ** 2),
        "J2": trap(d ** 2 / r ** (n - 1), r),
    }


def decay_functionals(prev, nxt, profile, params):
    """I1, J1, J2 at ``nxt`` with forward-difference time derivatives."""
    a = decay_values(prev, profile, params)
    b = decay_values(nxt, profile, params)
    dt = nxt.t - prev.t
    if dt <= 0:
        raise InputError("snapshots must be consecutive in time")
    out = {"t": nxt.t, **b}
    for key in ("I1", "J1", "J2"):
        out["d" + key] = (b[key] - a[key]) / dt
    return out


def convergence_metric(snap, profile):
    """sup |rho - rho~| + sup |u - u~| over the nodes."""
    _, rho, u, rho_t, u_t = _eulerian(snap, profile)
    return float(np.max(np.abs(rho - rho_t)) + np.max(np.abs(u - u_t)))


def envelope_trend(times, values, windows=4):
    """Maxima of a series over dyadic windows ending at the final time.

    Returns the window maxima from earliest to latest; a decaying series
    has a nonincreasing sequence.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    T = times[-1]
    out = []
    for k in range(windows - 1, -1, -1):
        sel = (times >= T / 2 ** (k + 1)) & (times <= T / 2 ** k)
        if np.any(sel):
            out.append(float(np.max(values[sel])))
    return out


def decay_trend(times, values, ratio=0.1, windows=4):
    """Decay verdict for a nonnegative series with an initial transient.

    The series must end at or below ``ratio`` times its peak, and the log of
    the series must have a negative least-squares slope from the peak on.
    Window maxima of :func:`envelope_trend` are reported alongside.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 3:
        raise InputError("need at least three samples")
    k = int(np.argmax(values))
    peak, final = float(values[k]), float(values[-1])
    tail_t, tail_v = times[k:], values[k:]
    slope = None
    if tail_t.size >= 2 and np.all(tail_v > 0):
        slope = float(np.polyfit(tail_t, np.log(tail_v), 1)[0])
    small = final <= ratio * peak if peak > 0 else True
    return {
        "t_peak": float(times[k]),
        "peak": peak,
        "final": final,
        "final_over_peak": final / peak if peak > 0 else 0.0,
        "log_slope": slope,
        "envelope": envelope_trend(times, values, windows),
        "decreasing": bool(small and (slope is None or slope < 0)),
    }
