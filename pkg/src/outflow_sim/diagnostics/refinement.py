"""Self-convergence of the cut-off family in m."""

import itertools

import numpy as np
from scipy.interpolate import CubicSpline

from ..cutoffs import chi, phi_m
from ..errors import InputError
from ..lagrangian import radius_R
from ..stationary import sample_profile


def extension(snap, profile, m, r):
    """(rho, u) blended into the stationary profile with phi_m, at radii r <= m."""
    rho_t, u_t, *_ = sample_profile(profile, np.minimum(r, profile.r_max))
    rho = CubicSpline(snap.r, 1.0 / snap.v)(r)
    u = CubicSpline(snap.r, snap.u)(r)
    w = phi_m(r, m)
    return rho * w + rho_t * (1.0 - w), u * w + u_t * (1.0 - w)


def _check_family(trajs):
    if len(trajs) < 2:
        raise InputError("need at least two runs")
    base = trajs[0]
    for tr in trajs[1:]:
        if tr.params != base.params:
            raise InputError("runs differ in parameters")
        if tr.cfg.scheme != base.cfg.scheme:
            raise InputError("runs differ in time integrator")
    ms = [tr.cfg.m for tr in trajs]
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise InputError("runs must be ordered by strictly increasing m", m=ms)


def chi_refinement_study(trajs, r_window=None, t_window=None, samples=400, time_tol=1e-9):
    """Pairwise sup-differences of the extensions on a common (r, t) window.

    Runs are compared at their common snapshot times. Returns a dict with the
    table rows (one per pair), the consecutive-pair differences and the
    smallest value of chi_m seen on the window for each run.
    """
    trajs = sorted(trajs, key=lambda tr: tr.cfg.m)
    _check_family(trajs)
    m1 = trajs[0].cfg.m
    r_lo, r_hi = r_window if r_window is not None else (1.0, 0.5 * m1)
    if not (1.0 <= r_lo < r_hi <= m1):
        raise InputError("window must lie inside [1, m1]", window=(r_lo, r_hi))
    T = min(tr.times[-1] for tr in trajs)
    t_lo, t_hi = t_window if t_window is not None else (0.0, T)
    r = np.linspace(r_lo, r_hi, samples)
    common = None
    for tr in trajs:
        t = tr.times[(tr.times >= t_lo - time_tol) & (tr.times <= t_hi + time_tol)]
        if common is None:
            common = t
        else:
            keep = np.min(np.abs(common[:, None] - t[None, :]), axis=1) <= time_tol * max(1.0, t_hi)
            common = common[keep]
    if common is None or common.size == 0:
        raise InputError("runs share no snapshot times in the window")
    fields = {}
    chi_min = {}
    for tr in trajs:
        m = tr.cfg.m
        lookup = {round(s.t / time_tol): s for s in tr.snapshots}
        rows_rho, rows_u = [], []
        cmin = 1.0
        for t in common:
            s = min(tr.snapshots, key=lambda q: abs(q.t - t)) if round(t / time_tol) not in lookup \
                else lookup[round(t / time_tol)]
            rho, u = extension(s, tr.profile, m, r)
            rows_rho.append(rho)
            rows_u.append(u)
            r_M0 = radius_R(s.x, s.v, tr.cmap.M0, s.x[0], s.n)
            cmin = min(cmin, float(np.min(chi(r, r_M0))))
        fields[m] = (np.array(rows_rho), np.array(rows_u))
        chi_min[m] = cmin
    rows = []
    for a, b in itertools.combinations([tr.cfg.m for tr in trajs], 2):
        d_rho = float(np.max(np.abs(fields[a][0] - fields[b][0])))
        d_u = float(np.max(np.abs(fields[a][1] - fields[b][1])))
        rows.append({"m_a": a, "m_b": b, "sup_rho": d_rho, "sup_u": d_u, "sup": d_rho + d_u})
    ms = [tr.cfg.m for tr in trajs]
    consecutive = [next(row["sup"] for row in rows if row["m_a"] == a and row["m_b"] == b)
                   for a, b in zip(ms, ms[1:])]
    return {
        "window": (r_lo, r_hi, float(common[0]), float(common[-1])),
        "times": int(common.size),
        "rows": rows,
        "consecutive": consecutive,
        "decreasing": all(b < a for a, b in zip(consecutive, consecutive[1:])),
        "chi_min": chi_min,
    }
