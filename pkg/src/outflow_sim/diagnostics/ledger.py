"""Run-level assembly of the diagnostics and their verdicts."""

from dataclasses import dataclass, field

import numpy as np

from .energy import SLACK, boundary_growth, energy_ledger, energy_terms, pointwise_monitors
from .evolution import (F_diagnostics, F_norm, convergence_metric, decay_values,
                        envelope_trend, eta_weighted_norms)
from .fields import snapshot_fields

LEDGER_FIELDS = ("t", "energy", "dissipation_visc", "dissipation_bdry", "sink_psi", "sink_G",
                 "sup_psi_w", "v_min", "v_max", "F_norm", "I1", "J1", "J2", "conv_metric",
                 "ineq_violation")

BALANCE_FIELDS = ("t", "dt", "dE", "visc_half", "visc_full", "bdry", "source", "forcing",
                  "identity_residual", "eps_disc", "violation", "violation_full")


@dataclass
class RunDiagnostics:
    ledger: list
    balance: list
    monitors: list
    weighted: list
    F_pairs: list
    boundary: dict
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.verdicts.values())

    def totals(self):
        return {
            "eps_disc": float(sum(b["eps_disc"] for b in self.balance)),
            "violation_pos": float(sum(max(b["violation"], 0.0) for b in self.balance)),
            "F_residual_max": max((f["residual_L2"] for f in self.F_pairs), default=0.0),
        }


def run_diagnostics(traj, deltas=(0.5, 1.0, 2.0), weighted_every=1, F_pairs=True):
    """Energy ledger, monitors and verdicts for every stored snapshot."""
    params, profile = traj.params, traj.profile
    M0 = traj.cmap.M0
    snaps = traj.snapshots
    terms = [energy_terms(s, profile, params, snapshot_fields(s, profile, params)) for s in snaps]
    ledger, balance, monitors, weighted, Fp = [], [], [], [], []
    for j, (s, tm) in enumerate(zip(snaps, terms)):
        viol = 0.0
        if j > 0:
            bal = energy_ledger(snaps[j - 1], s, profile, params, terms[j - 1], tm)
            viol = bal["violation"]
            row = {k: bal[k] for k in ("t", "dt", "dE", "identity_residual", "eps_disc",
                                       "violation", "violation_full")}
            row.update({k: 0.5 * (terms[j - 1][k] + tm[k]) for k in
                        ("visc_half", "visc_full", "bdry", "source", "forcing")})
            row["holds"] = bal["holds"]
            row["energy_nonincreasing"] = bal["energy_nonincreasing"]
            balance.append(row)
            if F_pairs:
                Fp.append(F_diagnostics(snaps[j - 1], s, profile, params, M0))
        dec = decay_values(s, profile, params)
        ledger.append({
            "t": s.t,
            "energy": tm["energy"],
            "dissipation_visc": tm["visc_half"],
            "dissipation_bdry": tm["bdry"],
            "sink_psi": tm["sink_psi"],
            "sink_G": tm["sink_G"],
            "sup_psi_w": tm["sup_psi_w"],
            "v_min": tm["v_min"],
            "v_max": tm["v_max"],
            "F_norm": F_norm(s, profile, params, M0),
            "I1": dec["I1"],
            "J1": dec["J1"],
            "J2": dec["J2"],
            "conv_metric": convergence_metric(s, profile),
            "ineq_violation": viol,
        })
        monitors.append(pointwise_monitors(s, profile, params, tm))
        if j % weighted_every == 0 or j == len(snaps) - 1:
            if s.x[0] <= M0:
                for d in deltas:
                    weighted.append(eta_weighted_norms(s, profile, params, M0, d))
    bmap = traj.boundary_map()
    boundary = boundary_growth(bmap.B_times, bmap.B_values, params.u_b)
    diag = RunDiagnostics(ledger, balance, monitors, weighted, Fp, boundary)
    diag.verdicts = verdicts(diag)
    return diag


def verdicts(diag):
    led, bal, mon = diag.ledger, diag.balance, diag.monitors
    E0 = led[0]["energy"]
    scale = max(E0, 1e-300)
    wmin = [m["window_min"] for m in mon if m["window_min"] is not None]
    out = {
        "energy_nonincreasing": all(b["energy_nonincreasing"] for b in bal),
        "energy_below_initial": all(r["energy"] <= E0 + sum(b["eps_disc"] for b in bal) + SLACK * scale
                                    for r in led),
        "dissipation_nonnegative": all(r[k] >= 0.0 for r in led for k in
                                       ("dissipation_visc", "dissipation_bdry", "sink_psi", "sink_G")),
        "weak_inequality": all(b["holds"] for b in bal),
        "v_positive": min(r["v_min"] for r in led) > 0.0,
        "sobolev": all(m["sobolev_holds"] for m in mon),
        "unit_windows_positive": (min(wmin) > 0.0) if wmin else True,
        "interpolation_bounds": all(w["holds_a"] and w["holds_b"] for w in diag.weighted),
        "boundary_affine": not diag.boundary["superlinear"],
    }
    if diag.F_pairs:
        env = envelope_trend([r["t"] for r in led], [r["F_norm"] for r in led])
        out["F_bounded"] = max(env) <= max(led[0]["F_norm"], env[0]) * (1.0 + 1e-8) if env else True
    return out
