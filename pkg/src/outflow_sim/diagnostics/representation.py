"""Reconstruction of v from the explicit representation formulas.

Each variant integrates per-snapshot functionals of the computed solution
over the relevant mass window and time interval, assembles the exponential
weight A D in log space and compares

    v(x,t)^gamma = [v_start^gamma + (K gamma / mu) int A D ds] / (A D)(t)

with the computed v(x,t)^gamma. Variants:

* ``interior``: B(t) <= x <= M0 - 2, x in I_t^(k-1), cut-off zeta_{k,t}.
* ``near-M0``: M0 - 2 < x < M0, integrals over [x, M0] and the trace of v at M0.
* ``outer``: M0 <= x <= M(t), started at the entry time of x with v = vt(m),
  cut-off xi_{k,t}.
"""

from dataclasses import dataclass

import numpy as np

from ..cutoffs import xi, zeta
from ..errors import InputError, QuadratureResolutionError, RangeError
from ..lagrangian import cumulative_trapezoid
from ..stationary import sample_profile

MIN_SAMPLES = 10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class RepresentationResult:
    variant: str
    x: float
    t: float
    k: int
    computed: float
    reconstructed: float
    rel_error: float
    samples: int

    def as_dict(self):
        return dict(self.__dict__)


def _panels(a, b, width=0.25):
    # Gauss-Legendre nodes and weights on [a, b] split into short panels
    if b <= a:
        return np.zeros(0), np.zeros(0)
    k = max(1, int(np.ceil((b - a) / width)))
    edges = np.linspace(a, b, k + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    y = (mid[:, None] + half[:, None] * _GL_X).ravel()
    w = (half[:, None] * _GL_W).ravel()
    return y, w


class _Sampler:
    """Fields of one snapshot at arbitrary mass points (linear in x)."""

    def __init__(self, snap, profile, params, right):
        self.snap = snap
        self.x = snap.x
        self.profile = profile
        self.params = params
        self.right = right

    def at(self, y):
        x = self.x
        y = np.asarray(y, dtype=float)
        if np.any(y < x[0] - 1e-12):
            raise RangeError("mass point left of B(t)", t=self.snap.t)
        v_m, u_m, r_m = self.right
        v = np.interp(y, x, self.snap.v, right=v_m)
        u = np.interp(y, x, self.snap.u, right=u_m)
        r = np.interp(y, x, self.snap.r, right=r_m)
        return r, v, u

    def functionals(self, params, f_of_r, region, window, weight):
        """(int_window v^-gamma, int wt u~^2/r^n, int wt (psi/r^(n-1) - f), int wt psi^2/r^n,
        int_window log v) with wt the cut-off on ``region``."""
        n, gamma = params.n, params.gamma
        y, w = region
        r, v, u = self.at(y)
        rr = np.minimum(r, self.profile.r_max)
        _, ut, *_ = sample_profile(self.profile, rr)
        psi = u - ut
        wt = w * weight(y)
        yw, ww = window
        _, vw, _ = self.at(yw)
        return np.array([
            ww @ vw ** (-gamma),
            wt @ (ut ** 2 / r ** n),
            wt @ (psi / r ** (n - 1) - f_of_r(rr)),
            wt @ (psi ** 2 / r ** n),
            ww @ np.log(vw),
        ])


def _exp_integral(times, L):
    """int exp(L) ds with L linear on each sampling interval (exact for that model)."""
    if times.size < 2:
        return 0.0
    h = np.diff(times)
    d = np.diff(L)
    small = np.abs(d) < 1e-8
    ratio = np.where(small, 1.0 + 0.5 * d, np.expm1(d) / np.where(small, 1.0, d))
    return float(np.sum(h * np.exp(L[:-1]) * ratio))


def _assemble(times, vals, sign, v_start_gamma, params, log_v0_window):
    K, gamma, mu, n = params.K, params.gamma, params.mu, params.n
    a, w, c, q, lg = vals.T
    cum = lambda f: cumulative_trapezoid(f, times)
    logAD = ((K * gamma / mu) * cum(a)
             + sign * ((gamma / mu) * (c - c[0]) + ((n - 1) * gamma / mu) * (cum(q) - cum(w)))
             - gamma * (lg - log_v0_window))
    ref = logAD[-1]
    integral = _exp_integral(times, logAD - ref)
    return v_start_gamma * np.exp(-ref) + (K * gamma / mu) * integral


def _time_window(traj, t_start, t):
    times = traj.times
    j_end = int(np.argmin(np.abs(times - t)))
    if abs(times[j_end] - t) > 1e-9 * max(1.0, t):
        raise InputError("probe time must coincide with a stored snapshot", t=t)
    return _select(times, t_start, j_end)


def _select(times, t_start, j_end):
    sel = [j for j in range(j_end + 1) if times[j] >= t_start - 1e-12]
    if len(sel) < MIN_SAMPLES:
        raise QuadratureResolutionError("too few snapshots in the time interval",
                                        samples=len(sel), needed=MIN_SAMPLES)
    return sel, j_end


def snap_time(traj, t):
    """The stored snapshot time nearest to ``t``."""
    times = traj.times
    return float(times[int(np.argmin(np.abs(times - t)))])


def representation_check(traj, x, t, k=None, variant="interior", snap=False):
    """Compare v(x,t)^gamma with its reconstruction; returns RepresentationResult.

    ``t`` must be a stored snapshot time unless ``snap`` is set, in which case
    the nearest stored time is used (and reported).
    """
    params, profile, cmap = traj.params, traj.profile, traj.cmap
    if snap:
        t = snap_time(traj, t)
    gamma, n = params.gamma, params.n
    bmap = traj.boundary_map()
    M0 = cmap.M0
    B_t, M_t = bmap.B(t), cmap.M(t)
    cfg = traj.cfg
    rho_m, u_m, *_ = sample_profile(profile, cfg.m)
    right = (1.0 / rho_m, u_m, cfg.m)
    f_of_r = profile.f_function

    if variant == "interior":
        if not (B_t <= x <= M0 - 2.0):
            raise RangeError("interior variant needs B(t) <= x <= M0 - 2", x=x, t=t)
        if k is None:
            k = int(np.floor(x - B_t)) + 1
        if not (B_t + k - 1 <= x <= B_t + k):
            raise RangeError("x is not in I_t^(k-1)", x=x, k=k)
        window = _panels(B_t + k, B_t + k + 1)
        region = (np.concatenate([_panels(x, B_t + k)[0], window[0]]),
                  np.concatenate([_panels(x, B_t + k)[1], window[1]]))
        weight = lambda y: zeta(y, B_t, k)
        t_start, sign, start_x = 0.0, 1.0, None
    elif variant == "near-M0":
        if not (M0 - 2.0 < x < M0) or x < B_t:
            raise RangeError("near-M0 variant needs max(B(t), M0 - 2) < x < M0", x=x, t=t)
        k = 0 if k is None else k
        region = _panels(x, M0)
        window = (np.array([M0]), np.array([1.0]))
        weight = lambda y: np.ones_like(y)
        t_start, sign, start_x = 0.0, 1.0, None
    elif variant == "outer":
        if not (M0 <= x <= M_t):
            raise RangeError("outer variant needs M0 <= x <= M(t)", x=x, t=t)
        if k is None:
            k = int(np.floor(M_t - x)) + 1
        if not (M_t - k <= x <= M_t - k + 1):
            raise RangeError("x is not in J_t^(k-1)", x=x, k=k)
        window = _panels(M_t - k - 1, M_t - k)
        lo = max(M_t - k - 1, B_t)
        region = _panels(lo, x)
        weight = lambda y: xi(y, M_t, k)
        t_start, sign = (x - M0) / cmap.slope, -1.0
    else:
        raise InputError("unknown variant", variant=variant)

    sel, j_end = _time_window(traj, t_start, t)
    snaps = [traj.snapshots[j] for j in sel]
    times = np.array([s.t for s in snaps])
    if variant == "outer" and times[0] > t_start:
        # prepend the entry time with fields interpolated in time
        j0 = sel[0]
        if j0 == 0:
            raise QuadratureResolutionError("entry time precedes the first snapshot")
        a, b = traj.snapshots[j0 - 1], traj.snapshots[j0]
        lam = (t_start - a.t) / (b.t - a.t)
        fa = _Sampler(a, profile, params, right).functionals(params, f_of_r, region, window, weight)
        fb = _Sampler(b, profile, params, right).functionals(params, f_of_r, region, window, weight)
        first = (1.0 - lam) * fa + lam * fb
        vals = np.array([first] + [_Sampler(s, profile, params, right).functionals(
            params, f_of_r, region, window, weight) for s in snaps])
        times = np.concatenate([[t_start], times])
    else:
        vals = np.array([_Sampler(s, profile, params, right).functionals(
            params, f_of_r, region, window, weight) for s in snaps])

    if variant == "outer":
        v_start_gamma = right[0] ** gamma
        log_ref = vals[0, 4]
    else:
        v_start_gamma = float(np.interp(x, snaps[0].x, snaps[0].v)) ** gamma
        log_ref = vals[0, 4]
    rec = _assemble(times, vals, sign, v_start_gamma, params, log_ref)
    final = traj.snapshots[j_end]
    computed = float(np.interp(x, final.x, final.v)) ** gamma
    return RepresentationResult(variant, float(x), float(t), int(k), computed, float(rec),
                                abs(rec - computed) / computed, int(times.size))


def representation_probes(traj, variant="interior", count=10, offsets=None):
    """Probe points (x, t) spread over the run for the given variant."""
    cmap = traj.cmap
    bmap = traj.boundary_map()
    times = traj.times
    T = times[-1]
    picks = [times[int(np.argmin(np.abs(times - T * (j + 1) / count)))] for j in range(count)]
    probes = []
    for j, t in enumerate(picks):
        B_t = bmap.B(t)
        if variant == "interior":
            span = cmap.M0 - 2.0 - B_t
            off = offsets[j] if offsets is not None else float(
                np.geomspace(0.5, max(0.5 * span, 0.5), count)[j])
            probes.append((B_t + off, t))
        elif variant == "near-M0":
            probes.append((cmap.M0 - 0.1 - 1.8 * j / max(count - 1, 1), t))
        else:
            M_t = cmap.M(t)
            x = cmap.M0 + (M_t - cmap.M0) * (0.2 + 0.6 * j / max(count - 1, 1))
            probes.append((x, t))
    return probes
