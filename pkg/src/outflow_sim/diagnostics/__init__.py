"""Diagnostics computed from stored trajectories."""

from .energy import energy_ledger, energy_terms, pointwise_monitors, unit_window_bounds
from .evolution import (F_diagnostics, F_norm, convergence_metric, decay_functionals, decay_trend,
                        eta_weighted_norms)
from .ledger import BALANCE_FIELDS, LEDGER_FIELDS, run_diagnostics
from .refinement import chi_refinement_study
from .representation import representation_check, representation_probes

__all__ = [
    "BALANCE_FIELDS",
    "LEDGER_FIELDS",
    "F_diagnostics",
    "F_norm",
    "chi_refinement_study",
    "convergence_metric",
    "decay_functionals",
    "decay_trend",
    "energy_ledger",
    "energy_terms",
    "eta_weighted_norms",
    "pointwise_monitors",
    "representation_check",
    "representation_probes",
    "run_diagnostics",
    "unit_window_bounds",
]
