import numpy as np
import pytest
import sympy as sp
from scipy.integrate import solve_ivp

from outflow_sim.errors import InsufficientDataError, ParameterRegimeError, RangeError
from outflow_sim.model import Params
from outflow_sim.stationary import (geometric_mesh, ode_residual, sample_profile, solve_stationary,
                                    stationary_report)


def _density_ode():
    """rho'' from the radial momentum balance with u = b r^(1-n)/rho, derived symbolically."""
    r = sp.symbols("r", positive=True)
    b, K, g, mu, n = sp.symbols("b K gamma mu n")
    y0, y1, y2 = sp.symbols("y0 y1 y2")
    rho = sp.Function("rho")(r)
    u = b * r ** (1 - n) / rho
    balance = (rho * u * sp.diff(u, r) + sp.diff(K * rho ** g, r)
               - mu * sp.diff(r ** (1 - n) * sp.diff(r ** (n - 1) * u, r), r))
    balance = balance.subs(sp.Derivative(rho, (r, 2)), y2).subs(sp.Derivative(rho, r), y1).subs(rho, y0)
    rhs = sp.solve(sp.Eq(balance, 0), y2)[0]
    return sp.lambdify((r, y0, y1, b, K, g, mu, n), rhs, "numpy")


@pytest.mark.parametrize("n", [2, 3])
def test_profile_matches_independent_stiff_integration(n, profile2, profile3):
    prof = profile2 if n == 2 else profile3
    p = prof.params
    f = _density_ode()
    args = (prof.flux, p.K, p.gamma, p.mu, p.n)
    sol = solve_ivp(lambda r, y: [y[1], f(r, y[0], y[1], *args)], (prof.r_max, 1.0),
                    [prof.rho[-1], prof.drho[-1]], method="Radau", rtol=1e-11, atol=1e-14,
                    dense_output=True)
    rho, drho = sol.sol(prof.r)
    assert np.max(np.abs(rho - prof.rho)) < 1e-5
    assert np.max(np.abs(drho - prof.drho)) < 5e-3 * np.max(np.abs(prof.drho))
    # the nonlocal coefficient is the density the flux was built from
    assert rho[0] == pytest.approx(prof.rho1, abs=1e-5)


def test_flux_identity_and_monotonicity(profile2):
    p = profile2.params
    flux = profile2.r ** (p.n - 1) * profile2.rho * profile2.u
    np.testing.assert_allclose(flux, profile2.rho1 * p.u_b, rtol=1e-12)
    assert np.all(np.diff(profile2.rho) > 0)
    assert np.all(profile2.rho < p.rho_plus)
    assert np.all(profile2.u < 0)


def test_ode_residual_small_and_shrinks(profile2):
    coarse = solve_stationary(profile2.params, N=1000)
    fine_res = np.max(np.abs(ode_residual(profile2)))
    coarse_res = np.max(np.abs(ode_residual(coarse)))
    assert fine_res < 1e-3
    assert coarse_res / fine_res > 2.5


def test_rho1_converges_under_refinement(profile2):
    a = solve_stationary(profile2.params, N=1000).rho1
    b = solve_stationary(profile2.params, N=4000).rho1
    assert abs(a - profile2.rho1) > abs(b - profile2.rho1)
    assert abs(b - profile2.rho1) < 1e-6


@pytest.mark.parametrize("n", [2, 3])
def test_decay_exponents(n, profile2, profile3):
    prof = profile2 if n == 2 else profile3
    rep = stationary_report(prof, window=(10.0, 40.0))
    assert rep.passed, rep.as_dict()
    assert rep.slopes["rho_gap"] == pytest.approx(-(2 * n - 2), abs=0.3)
    assert rep.slopes["du"] == pytest.approx(-n, abs=0.3)


def test_no_flow_profile_is_constant():
    prof = solve_stationary(Params(u_b=0.0, rho_plus=1.7), N=200)
    assert np.all(prof.rho == 1.7)
    assert np.all(prof.u == 0.0)
    rep = stationary_report(prof)
    assert rep.passed
    assert not rep.defined
    assert all(s is None for s in rep.slopes.values())


def test_sample_profile_exact_at_nodes(profile2):
    idx = [0, 17, 500, profile2.r.size - 1]
    rho, u, drho, du, ddrho = sample_profile(profile2, profile2.r[idx])
    np.testing.assert_array_equal(rho, profile2.rho[idx])
    np.testing.assert_array_equal(u, profile2.u[idx])
    np.testing.assert_array_equal(ddrho, profile2.ddrho[idx])


def test_sample_profile_between_nodes_is_monotone(profile2):
    r = np.linspace(1.0, profile2.r_max, 20001)
    rho, *_ = sample_profile(profile2, r)
    assert np.all(np.diff(rho) >= 0)


def test_sample_profile_scalar_and_range(profile2):
    vals = sample_profile(profile2, 3.0)
    assert all(isinstance(v, float) for v in vals)
    with pytest.raises(RangeError):
        sample_profile(profile2, profile2.r_max + 1.0)
    with pytest.raises(RangeError):
        sample_profile(profile2, 0.5)


def test_f_function_properties(profile2):
    r = np.linspace(1.0, profile2.r_max, 400)
    f = profile2.f_function(r)
    assert f[0] == 0.0
    assert np.all(np.diff(f) <= 0)


def test_rows_match_header(profile2):
    rows = profile2.rows()
    assert rows.shape == (profile2.r.size, 6)


def test_geometric_mesh_endpoints():
    r = geometric_mesh(50.0, 100)
    assert r[0] == 1.0 and r[-1] == 50.0
    assert np.all(np.diff(np.diff(np.log(r))) < 1e-12)


def test_invalid_domain_and_tolerance(params2):
    with pytest.raises(RangeError):
        solve_stationary(params2, r_max=5.0)
    with pytest.raises(RangeError):
        solve_stationary(params2, tol=0.0)


def test_report_needs_enough_nodes(profile2):
    with pytest.raises(InsufficientDataError):
        stationary_report(profile2, window=(10.0, 10.01))


def test_strong_outflow_is_rejected():
    with pytest.raises((ParameterRegimeError, RangeError)):
        solve_stationary(Params(u_b=-3.0), N=400)
