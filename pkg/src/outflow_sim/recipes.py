"""Ready-made initial data and runs used by the CLI, tests and benchmarks."""

from dataclasses import dataclass

import numpy as np

from .model import Params
from .solver import SolverConfig, build_initial_data, evolve, initialize_lagrangian, make_stepper
from .stationary import sample_profile, solve_stationary


@dataclass(frozen=True)
class Bump:
    """Gaussian bump added to the stationary density (and optionally velocity)."""

    amplitude: float = 0.3
    center: float = 4.0
    width: float = 0.7
    u_amplitude: float = 0.0

    def shape(self, r):
        return np.exp(-(((np.asarray(r, dtype=float) - self.center) / self.width) ** 2))

    def data(self, profile):
        def rho0(r):
            return sample_profile(profile, r)[0] + self.amplitude * self.shape(r)

        def u0(r):
            return sample_profile(profile, r)[1] + self.u_amplitude * self.shape(r)

        return rho0, u0


def standard_params(n=2):
    return Params(n=n, gamma=1.4, K=1.0, mu=1.0, rho_plus=1.0, u_b=-0.05)


def run_bump(params, cfg, bump=Bump(), profile=None, r_max=None, hooks=()):
    """Stationary profile, cut-off initial data, and the evolved trajectory."""
    if profile is None:
        profile = solve_stationary(params, r_max=r_max or max(50.0, 1.25 * cfg.m))
    rho0, u0 = bump.data(profile)
    init = build_initial_data(rho0, u0, profile, cfg.m)
    state, cmap = initialize_lagrangian(init, cfg, params)
    stepper = make_stepper(params, profile, cfg, cmap)
    traj = evolve(state, cfg.t_end, cfg, stepper, hooks=hooks)
    return traj, init


def standard_config(N=512, t_end=50.0, stride=None, m=40.0, **kw):
    if stride is None:
        stride = max(1, N // 64)
    return SolverConfig(m=m, N=N, t_end=t_end, stride=stride, **kw)


def _threads():
    import os

    try:
        return max(1, int(os.environ.get("OUTFLOW_SIM_THREADS", "1")))
    except ValueError:
        return 1


def m_family(params, ms, base, bump=Bump(), profile=None, dt_safety=0.8):
    """Runs differing only in m, with shared inner nodes, dt and snapshot times.

    ``base`` fixes the radial spacing dr = (base.m - 1)/(base.N - 1) unless it
    already carries ``dr``; every run uses the smallest initial stable step
    times ``dt_safety`` so snapshot times coincide exactly.
    """
    from concurrent.futures import ThreadPoolExecutor
    from dataclasses import replace

    ms = sorted(float(m) for m in ms)
    if profile is None:
        profile = solve_stationary(params, r_max=max(50.0, 1.25 * ms[-1]))
    dr = base.dr if base.dr is not None else (base.m - 1.0) / (base.N - 1)
    rho0, u0 = bump.data(profile)
    setups = []
    for m in ms:
        cfg = replace(base, m=m, dr=dr, dt=None)
        init = build_initial_data(rho0, u0, profile, m)
        state, cmap = initialize_lagrangian(init, cfg, params)
        stepper = make_stepper(params, profile, cfg, cmap)
        setups.append((cfg, state, stepper))
    dt = base.dt or dt_safety * min(st.stable_dt(s) for _, s, st in setups)

    def run(item):
        cfg, state, stepper = item
        cfg = replace(cfg, dt=dt)
        stepper.cfg = cfg
        return evolve(state, cfg.t_end, cfg, stepper)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(run, setups)), profile
