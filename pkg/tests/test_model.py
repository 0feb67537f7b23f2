import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outflow_sim.errors import DomainError, PreconditionError
from outflow_sim.model import (Params, check_phiG_bound, energy_density, energy_distance_G,
                               normalized_g, normalized_g_quadrature, phiG_bound_terms,
                               pressure_eulerian, pressure_lagrangian, relative_entropy_H)

# (v, vt, gamma, G) from the defining integral at 40 digits with mpmath, K = 1
G_ORACLE = [
    (2.0, 1.0, 1.0, 0.30685281944005469058),
    (2.0, 1.0, 2.0, 0.5),
    (0.5, 1.0, 1.4, 0.29876977693223562271),
    (3.7, 0.2, 1.4, 30.036164665205612205),
    (0.15, 8.0, 1.5, 4.1099467492370252053),
    (1.000001, 1.0, 1.4, 6.9999943988530280026e-13),
    (1.03, 0.97, 1.0, 0.0018376603768398381526),
    (9.5, 9.0, 2.0, 0.00032488628979857050032),
    (0.1, 10.0, 1.0, 3.6151701859880913131),
]

# (rho, sigma, gamma, H) with H = rho G(1/rho, 1/sigma), same oracle
H_ORACLE = [
    (2.0, 1.0, 1.0, 0.38629436111989061883),
    (2.0, 1.0, 2.0, 1.0),
    (0.5, 1.3, 1.4, 0.44753021599355383706),
    (1.00001, 1.0, 1.7, 8.4999915001389949522e-11),
]

volumes = st.floats(min_value=0.1, max_value=10.0)
gammas = st.floats(min_value=1.0, max_value=2.0)


def params(gamma, K=1.0):
    return Params(gamma=gamma, K=K)


@pytest.mark.parametrize("v, vt, gamma, expected", G_ORACLE)
def test_G_closed_form_matches_oracle(v, vt, gamma, expected):
    assert energy_distance_G(v, vt, params(gamma)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("v, vt, gamma, expected", G_ORACLE)
def test_G_quadrature_matches_oracle(v, vt, gamma, expected):
    got = energy_distance_G(v, vt, params(gamma), mode="quadrature", atol=1e-14)
    assert got == pytest.approx(expected, rel=1e-8, abs=1e-20)


@pytest.mark.parametrize("rho, sigma, gamma, expected", H_ORACLE)
def test_H_closed_form_matches_oracle(rho, sigma, gamma, expected):
    assert relative_entropy_H(rho, sigma, params(gamma)) == pytest.approx(expected, rel=1e-10)


def test_G_scales_linearly_with_K():
    a = energy_distance_G(0.3, 2.0, params(1.4, K=1.0))
    b = energy_distance_G(0.3, 2.0, params(1.4, K=3.5))
    assert b == pytest.approx(3.5 * a, rel=1e-14)


def test_G_vanishes_on_the_diagonal():
    vt = np.array([0.1, 1.0, 7.0])
    assert np.all(energy_distance_G(vt, vt, params(1.4)) == 0.0)


def test_G_is_continuous_across_series_branch():
    # the closed form switches to a Taylor series at |v/vt - 1| = 0.05
    p = params(1.4)
    edge = 0.05
    inside = energy_distance_G(1.0 + edge * (1 - 1e-9), 1.0, p)
    outside = energy_distance_G(1.0 + edge * (1 + 1e-9), 1.0, p)
    assert inside == pytest.approx(outside, rel=1e-7)


def test_normalized_g_against_quadrature():
    s = np.array([0.1, 0.5, 0.97, 1.2, 3.0, 9.0])
    for gamma in (1.0, 1.5, 2.0):
        np.testing.assert_allclose(normalized_g(s, gamma), normalized_g_quadrature(s, gamma, atol=1e-13),
                                   rtol=1e-9, atol=1e-15)


def test_pressure_forms_agree():
    p = params(1.4, K=2.0)
    rho = np.array([0.2, 1.0, 3.0])
    np.testing.assert_allclose(pressure_eulerian(rho, p), pressure_lagrangian(1.0 / rho, p), rtol=1e-15)


def test_energy_density_adds_kinetic_part():
    p = params(1.5)
    e = energy_density(1.0, 0.4, 2.0, 1.0, p)
    assert e == pytest.approx(0.18 + energy_distance_G(2.0, 1.0, p), rel=1e-14)


def test_nonpositive_volume_is_a_domain_error():
    with pytest.raises(DomainError):
        energy_distance_G(0.0, 1.0, params(1.4))
    with pytest.raises(DomainError):
        relative_entropy_H(1.0, -1.0, params(1.4))


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        energy_distance_G(1.0, 2.0, params(1.4), mode="series")


def test_bound_requires_gamma_at_most_two():
    with pytest.raises(PreconditionError):
        check_phiG_bound(1.0, 2.0, Params(gamma=2.5))


def test_bound_branches_are_labelled():
    p = params(1.4)
    assert check_phiG_bound(0.5, 1.0, p)["branch"] == "v<=vt"
    assert check_phiG_bound(2.0, 1.0, p)["branch"] == "v>vt"


def test_bound_is_nearly_sharp_at_gamma_two():
    # gamma = 2 and v <= vt is the sharp case of the lower bound
    p = params(2.0)
    _, lhs, rhs = phiG_bound_terms(np.array([0.999]), np.array([1.0]), p)
    assert lhs[0] <= rhs[0] * (1 + 1e-8)
    assert lhs[0] / rhs[0] > 0.99


@pytest.mark.parametrize("kwargs", [dict(n=1), dict(n=2.5), dict(gamma=0.9), dict(K=0.0),
                                    dict(mu=-1.0), dict(rho_plus=0.0), dict(u_b=0.1)])
def test_params_validation(kwargs):
    with pytest.raises(DomainError):
        Params(**kwargs)


def test_no_flow_params_allowed():
    assert Params(u_b=0.0).u_b == 0.0


@settings(max_examples=200, deadline=None)
@given(v=volumes, vt=volumes, gamma=gammas)
def test_G_nonnegative_and_bound_holds(v, vt, gamma):
    p = params(gamma)
    G = energy_distance_G(v, vt, p)
    assert G >= 0.0
    assert check_phiG_bound(v, vt, p)["holds"]


@settings(max_examples=200, deadline=None)
@given(v=volumes, vt=volumes, gamma=gammas)
def test_H_is_rho_times_G(v, vt, gamma):
    p = params(gamma)
    H = relative_entropy_H(1.0 / v, 1.0 / vt, p)
    G = energy_distance_G(v, vt, p)
    # forming 1/v and 1/vt perturbs the relative gap by ~1e-16, which dominates H ~ d^2 near the diagonal
    assert H == pytest.approx(G / v, rel=1e-9, abs=1e-20)


@settings(max_examples=100, deadline=None)
@given(a=volumes, b=volumes, vt=volumes, gamma=gammas)
def test_G_is_convex_in_v(a, b, vt, gamma):
    p = params(gamma)
    mid = energy_distance_G(0.5 * (a + b), vt, p)
    avg = 0.5 * (energy_distance_G(a, vt, p) + energy_distance_G(b, vt, p))
    assert mid <= avg * (1 + 1e-10) + 1e-14


@settings(max_examples=100, deadline=None)
@given(s=st.floats(min_value=0.01, max_value=100.0), gamma=gammas)
def test_g_dominates_log_form(s, gamma):
    assert normalized_g(s, gamma) >= (s - 1.0 - np.log(s)) * (1 - 1e-9) - 1e-15
