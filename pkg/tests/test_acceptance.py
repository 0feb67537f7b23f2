"""Acceptance suite: one test per primary criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` (or ``python
tests/test_acceptance.py``). The coarse and refined standard runs are shared
with the rest of the suite through the cached helpers in ``conftest``.
"""

import json
import math
import sys
import time

import numpy as np
import pytest

from outflow_sim.cli import run_command
from outflow_sim.diagnostics import decay_trend, representation_check, representation_probes
from outflow_sim.lagrangian import annulus_mass, mass_from_radius
from outflow_sim.recipes import standard_params
from outflow_sim.stationary import solve_stationary, stationary_report
from outflow_sim.verify import run_verify

from conftest import bump_run, perturbation_sup, steady_run


@pytest.fixture
def report(capsys):
    def emit(number, title, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if passed else 'FAIL'} {title}: {detail}")

    return emit


def test_1_inequality_certification(report):
    t0 = time.perf_counter()
    rep = run_verify(seed=42, samples=100000)
    elapsed = time.perf_counter() - t0
    failed = [c["check"] for c in rep["checks"] if not c["passed"]]
    ok = rep["passed"] and elapsed <= 60.0
    report(1, "verify --seed 42", ok,
           f"{len(rep['checks'])} checks, failed={failed}, runtime {elapsed:.1f}s")
    assert ok


def test_2_stationary_structure(report):
    t0 = time.perf_counter()
    reports = {}
    for n in (2, 3):
        prof = solve_stationary(standard_params(n), r_max=50.0, N=2000)
        reports[n] = stationary_report(prof, window=(10.0, 40.0))
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in reports.values()) and elapsed <= 30.0
    detail = "; ".join(
        f"n={n} slopes " + ", ".join(f"{k}={v:.3f}" for k, v in r.slopes.items())
        + f" flux_dev={r.flux_deviation:.1e}" for n, r in reports.items())
    report(2, "stationary structure", ok, f"{detail}; runtime {elapsed:.1f}s")
    assert ok


def test_3_fixed_point(report):
    coarse = perturbation_sup(steady_run(512))
    fine = perturbation_sup(steady_run(1024))
    ratio = coarse / fine
    ok = coarse <= 1e-3 and ratio >= 2.0
    report(3, "fixed point", ok, f"sup|phi|+sup|psi| N=512 {coarse:.2e}, N=1024 {fine:.2e}, ratio {ratio:.2f}")
    assert ok


def test_4_energy_ledger(report):
    _, coarse = bump_run(512)
    _, fine = bump_run(1024)
    nonincreasing = coarse.verdicts["energy_nonincreasing"]
    dissipation = coarse.verdicts["dissipation_nonnegative"]
    eps_c, eps_f = coarse.totals()["eps_disc"], fine.totals()["eps_disc"]
    pos_c, pos_f = coarse.totals()["violation_pos"], fine.totals()["violation_pos"]
    ratio = eps_c / eps_f
    ok = nonincreasing and dissipation and ratio >= 2.0
    report(4, "energy ledger", ok,
           f"nonincreasing={nonincreasing} dissipation>=0={dissipation} "
           f"eps_disc {eps_c:.2e} -> {eps_f:.2e} (ratio {ratio:.2f}); "
           f"positive-part violation {pos_c:.2e} -> {pos_f:.2e} (ratio {pos_c / pos_f:.2f}, informational)")
    assert ok


def test_5_pointwise_bounds(report):
    _, diag = bump_run(512)
    v_lo = min(r["v_min"] for r in diag.ledger)
    v_hi = max(r["v_max"] for r in diag.ledger)
    w_lo = min(m["window_min"] for m in diag.monitors)
    w_hi = max(m["window_max"] for m in diag.monitors)
    deltas = sorted({w["delta"] for w in diag.weighted})
    covered = len(diag.weighted) == len(deltas) * len(diag.ledger)
    ok = (v_lo > 0 and diag.verdicts["sobolev"] and diag.verdicts["interpolation_bounds"]
          and covered and w_lo > 0)
    report(5, "pointwise bounds", ok,
           f"v in [{v_lo:.4f}, {v_hi:.4f}], sup bound at {len(diag.monitors)} snapshots="
           f"{diag.verdicts['sobolev']}, weighted bounds deltas={deltas} at every snapshot={covered} "
           f"holds={diag.verdicts['interpolation_bounds']}, unit windows in [{w_lo:.4f}, {w_hi:.4f}]")
    assert ok


def _probe_errors(traj, variant):
    return [representation_check(traj, x, t, variant=variant, snap=True)
            for x, t in representation_probes(traj, variant, count=10)]


@pytest.mark.parametrize("variant, label", [("interior", "L1"), ("near-M0", "L3")])
def test_6_representation(report, variant, label):
    coarse_traj, _ = bump_run(256)
    fine_traj, _ = bump_run(512)
    coarse = _probe_errors(coarse_traj, variant)
    fine = _probe_errors(fine_traj, variant)
    e_c = max(r.rel_error for r in coarse)
    e_f = max(r.rel_error for r in fine)
    samples = len(coarse_traj.snapshots)
    ok = samples >= 200 and len(coarse) == 10 and e_c <= 0.05 and e_c / e_f >= 1.5
    report(6, f"representation in {label} ({variant})", ok,
           f"{len(coarse)} probes, {samples} snapshots; max rel error {e_c:.2e} -> {e_f:.2e} "
           f"(ratio {e_c / e_f:.2f})")
    assert ok


def _mass_drift(N):
    traj, _ = bump_run(N)
    return max(abs(annulus_mass(s, traj.cfg.m) - traj.cmap.M(s.t)) for s in traj.snapshots)


def test_7_coordinate_exactness(report):
    traj, _ = bump_run(512)
    cmap = traj.cmap
    inverse = 0.0
    affine = 0.0
    for s in traj.snapshots:
        X = mass_from_radius(s.x, s.v, s.r, s.n)
        inverse = max(inverse, float(np.max(np.abs(X - s.x))) / s.M)
        exact = cmap.M0 + cmap.rho1 * abs(cmap.u_b) * s.t
        affine = max(affine, abs(s.M - exact) / exact)
    drift = {N: _mass_drift(N) for N in (256, 512, 1024)}
    order = math.log2(drift[512] / drift[1024])
    exact_ok = inverse <= 1e-10 and affine <= 4 * np.finfo(float).eps
    ok = exact_ok and order >= 2.0 - 0.3
    report(7, "coordinate exactness", ok,
           f"max|X(R(x))-x|/M {inverse:.1e}, M(t) relative deviation {affine:.1e}, "
           "mass accounting drift " + ", ".join(f"N={N} {d:.2e}" for N, d in drift.items())
           + f" (observed order {order:.2f}, integrator order 2)")
    assert ok


def test_8_asymptotic_stability(report):
    _, diag = bump_run(512)
    t = [r["t"] for r in diag.ledger]
    metric = [r["conv_metric"] for r in diag.ledger]
    ratio = metric[-1] / metric[0]
    trends = {k: decay_trend(t, [r[k] for r in diag.ledger]) for k in ("conv_metric", "I1", "J1", "J2")}
    ok = ratio <= 0.1 and all(tr["decreasing"] for tr in trends.values())
    report(8, "asymptotic stability", ok,
           f"metric t=0 {metric[0]:.3e}, t={t[-1]:.0f} {metric[-1]:.3e} (ratio {ratio:.3f}); "
           + ", ".join(f"{k} final/peak {tr['final_over_peak']:.1e} slope {tr['log_slope']:.3f}"
                       for k, tr in trends.items()))
    assert ok


def test_9_m_refinement(report, tmp_path):
    t0 = time.perf_counter()
    code = run_command(["sweep-m", "-o", str(tmp_path), "-s", "sweep.m = [20, 40, 80]",
                        "-s", "solver.N = 512", "-s", "solver.m = 40", "-s", "solver.stride = 16",
                        "-s", "stationary.r_max = 100"])
    elapsed = time.perf_counter() - t0
    summary = json.loads((tmp_path / "summary.json").read_text())
    pairs = summary["consecutive"]
    ok = code == 0 and summary["decreasing"] and len(pairs) == 2
    report(9, "sweep-m", ok,
           f"window {summary['window']}, {summary['times']} common times, consecutive sup-differences "
           + " > ".join(f"{d:.2e}" for d in pairs) + f", runtime {elapsed:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
