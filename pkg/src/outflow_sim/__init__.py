"""Numerical study of viscous compressible outflow past a ball in R^n.

The public surface is small: build :class:`Params`, solve the stationary
profile, evolve perturbed data in Lagrangian mass coordinates and feed the
trajectory to :mod:`outflow_sim.diagnostics`.
"""

from .errors import OutflowError
from .kernels import BACKEND
from .model import Params
from .solver import SolverConfig, build_initial_data, evolve, initialize_lagrangian, make_stepper
from .stationary import sample_profile, solve_stationary, stationary_report

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "OutflowError",
    "Params",
    "SolverConfig",
    "build_initial_data",
    "evolve",
    "initialize_lagrangian",
    "make_stepper",
    "sample_profile",
    "solve_stationary",
    "stationary_report",
]
