import pytest

from outflow_sim.verify import (GAMMAS, check_cutoffs, check_eta_tilde, check_g_log_bound,
                                check_G_lower_bound, check_G_routes, run_verify)


def test_every_check_passes():
    report = run_verify(seed=3, samples=5000)
    assert report["passed"]
    names = {c["check"] for c in report["checks"]}
    assert len(names) >= 5


def test_bound_check_covers_every_gamma_and_branch():
    results = check_G_lower_bound(seed=1, samples=3000)
    assert {r["gamma"] for r in results} == set(GAMMAS)
    assert all(r["passed"] and r["samples"] > 0 for r in results)


@pytest.mark.parametrize("check", [check_g_log_bound, check_eta_tilde, check_cutoffs])
def test_property_checks(check):
    out = check(seed=5, samples=2000)
    out = out if isinstance(out, list) else [out]
    assert all(r["passed"] and r["failures"] == 0 for r in out)


def test_G_routes_agree():
    out = check_G_routes(seed=9, samples=2000)
    out = out if isinstance(out, list) else [out]
    assert all(r["worst"] <= 1e-8 for r in out)


def test_seed_changes_samples_not_verdict():
    a = run_verify(seed=1, samples=2000)
    b = run_verify(seed=2, samples=2000)
    assert a["passed"] and b["passed"]
    assert [c["worst"] for c in a["checks"]] != [c["worst"] for c in b["checks"]]
    assert run_verify(seed=1, samples=2000) == a
