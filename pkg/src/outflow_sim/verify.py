"""Randomized certification of the pointwise inequalities and cut-off properties.

All samples come from a Philox counter-based generator keyed by the seed, so
reports are reproducible byte for byte.
"""

import numpy as np

from . import cutoffs
from .model import Params, energy_distance_G, normalized_g, phiG_bound_terms

GAMMAS = (1.0, 1.5, 2.0)


def _rng(seed, stream):
    return np.random.Generator(np.random.Philox(key=[int(seed), stream]))


def _result(name, samples, failures, worst, **extra):
    return {"check": name, "samples": int(samples), "failures": int(failures),
            "worst": float(worst), "passed": failures == 0, **extra}


def check_G_lower_bound(seed, samples=100000):
    """Both branches of the quadratic lower bound for G on [0.1, 10]^2."""
    out = []
    for j, gamma in enumerate(GAMMAS):
        rng = _rng(seed, 10 + j)
        v = rng.uniform(0.1, 10.0, samples)
        vt = rng.uniform(0.1, 10.0, samples)
        p = Params(gamma=gamma)
        le, lhs, rhs = phiG_bound_terms(v, vt, p)
        ok = lhs <= rhs * (1.0 + 1e-8) + 1e-300
        ratio = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), 0.0)
        for branch, sel in (("v<=vt", le), ("v>vt", ~le)):
            out.append(_result(f"G_lower_bound[{branch}]", np.count_nonzero(sel),
                               np.count_nonzero(~ok & sel), np.max(ratio[sel], initial=0.0),
                               gamma=gamma))
    return out


def check_g_log_bound(seed, samples=10000):
    rng = _rng(seed, 20)
    s = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), samples))
    gamma = np.concatenate([np.repeat(GAMMAS, samples // 6), rng.uniform(1.0, 2.0, samples)])[:samples]
    g = _g_vec(s, gamma)
    lower = s - 1.0 - np.log(s)
    slack = 1e-12 * np.maximum(1.0, np.abs(lower))
    return [_result("g_above_s-1-log_s", samples, np.count_nonzero(g < lower - slack),
                    np.max(lower - g))]


def _g_vec(s, gamma):
    out = np.empty_like(s)
    for gv in np.unique(gamma):
        sel = gamma == gv
        out[sel] = normalized_g(s[sel], float(gv))
    return out


def check_eta_tilde(seed, samples=10000):
    rng = _rng(seed, 30)
    y = rng.uniform(-2.0, 1.0, samples)
    e = cutoffs.eta_tilde(y)
    d = cutoffs.eta_tilde_prime(y)
    gap = d ** 2 - 8.0 * e
    bad = (gap > 1e-12) | (e < 0) | (e > 1) | ((y <= -1) & (e != 1)) | ((y >= 0) & (e != 0))
    return [_result("eta_tilde_derivative_bound", samples, np.count_nonzero(bad), np.max(gap))]


def check_cutoffs(seed, samples=10000):
    rng = _rng(seed, 40)
    out = []
    B = rng.uniform(0.0, 5.0, samples)
    k = rng.integers(1, 20, samples).astype(float)
    y = B + rng.uniform(-1.0, k + 3.0)
    z = cutoffs.zeta(y, B, k)
    zp = cutoffs.zeta_prime(y, B, k)
    bad = ((z < 0) | (z > 1) | ((y <= B + k) & (z != 1)) | ((y >= B + k + 1) & (z != 0))
           | (np.abs(zp) > 1))
    out.append(_result("zeta_range_support", samples, np.count_nonzero(bad), 0.0))
    M = rng.uniform(50.0, 60.0, samples)
    y = M - rng.uniform(-1.0, k + 3.0)
    xi = cutoffs.xi(y, M, k)
    xp = cutoffs.xi_prime(y, M, k)
    bad = ((xi < 0) | (xi > 1) | ((y <= M - k - 1) & (xi != 0)) | ((y >= M - k) & (xi != 1))
           | (np.abs(xp) > 1))
    out.append(_result("xi_range_support", samples, np.count_nonzero(bad), 0.0))
    R = rng.uniform(5.0, 100.0, samples)
    r = R + rng.uniform(-3.0, 2.0, samples)
    c = cutoffs.chi(r, R)
    cp = cutoffs.chi_prime(r, R)
    bad = ((c < 0) | (c > 1) | ((r <= R - 1) & (c != 1)) | ((r >= R) & (c != 0))
           | (np.abs(cp) > np.sqrt(8.0)))
    out.append(_result("chi_range_support", samples, np.count_nonzero(bad), np.max(np.abs(cp))))
    m = rng.uniform(2.0, 100.0, samples)
    rr = rng.uniform(0.0, 1.2, samples) * m
    ph = cutoffs.phi_m(rr, m)
    bad = (ph < 0) | (ph > 1) | ((rr <= m / 2) & (ph != 1)) | ((rr >= m) & (ph != 0))
    out.append(_result("phi_m_range_support", samples, np.count_nonzero(bad), 0.0))
    return out


def check_G_routes(seed, samples=100000, rtol=1e-8):
    """Closed-form G against adaptive quadrature of its defining integral."""
    out = []
    for j, gamma in enumerate(GAMMAS):
        rng = _rng(seed, 50 + j)
        v = rng.uniform(0.1, 10.0, samples)
        vt = rng.uniform(0.1, 10.0, samples)
        p = Params(gamma=gamma)
        Gc = np.asarray(energy_distance_G(v, vt, p))
        Gq = np.asarray(energy_distance_G(v, vt, p, mode="quadrature", atol=1e-300))
        rel = np.abs(Gc - Gq) / np.maximum(np.abs(Gq), 1e-300)
        rel = np.where((Gc == 0) & (Gq == 0), 0.0, rel)
        out.append(_result("G_closed_vs_quadrature", samples, np.count_nonzero(rel > rtol),
                           np.max(rel), gamma=gamma))
    return out


def run_verify(seed=42, samples=100000):
    """All certifiers; returns {"seed", "checks": [...], "passed"}."""
    checks = []
    checks += check_G_lower_bound(seed, samples)
    checks += check_g_log_bound(seed, max(1000, samples // 10))
    checks += check_eta_tilde(seed, max(1000, samples // 10))
    checks += check_cutoffs(seed, max(1000, samples // 10))
    checks += check_G_routes(seed, samples)
    return {"seed": int(seed), "checks": checks, "passed": all(c["passed"] for c in checks)}
