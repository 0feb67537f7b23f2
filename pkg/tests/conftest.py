import functools

import numpy as np
import pytest

from outflow_sim.diagnostics import run_diagnostics
from outflow_sim.recipes import Bump, run_bump, standard_config, standard_params
from outflow_sim.stationary import solve_stationary


@functools.lru_cache(maxsize=None)
def profile_for(n):
    return solve_stationary(standard_params(n))


@functools.lru_cache(maxsize=None)
def bump_run(N, stride=32, t_end=50.0):
    """The standard perturbed run and its diagnostics, cached per session."""
    params = standard_params(2)
    cfg = standard_config(N=N, t_end=t_end, stride=stride, dense_until=0.5)
    traj, init = run_bump(params, cfg, profile=profile_for(2))
    return traj, run_diagnostics(traj)


@functools.lru_cache(maxsize=None)
def steady_run(N, t_end=10.0, stride=16):
    params = standard_params(2)
    cfg = standard_config(N=N, t_end=t_end, stride=stride)
    traj, _ = run_bump(params, cfg, bump=Bump(amplitude=0.0), profile=profile_for(2))
    return traj


def perturbation_sup(traj):
    worst = 0.0
    for snap in traj.snapshots:
        phi, psi = snap.perturbation(traj.profile)
        worst = max(worst, float(np.max(np.abs(phi)) + np.max(np.abs(psi))))
    return worst


@pytest.fixture(scope="session")
def params2():
    return standard_params(2)


@pytest.fixture(scope="session")
def profile2():
    return profile_for(2)


@pytest.fixture(scope="session")
def profile3():
    return profile_for(3)


@pytest.fixture(scope="session")
def short_run(params2, profile2):
    cfg = standard_config(N=128, t_end=2.0, stride=8, m=20.0)
    traj, _ = run_bump(params2, cfg, profile=profile2)
    return traj
