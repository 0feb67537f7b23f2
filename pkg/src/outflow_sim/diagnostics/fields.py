"""Per-snapshot fields shared by the diagnostics."""

from dataclasses import dataclass

import numpy as np

from ..lagrangian import fd_first
from ..model import energy_distance_G
from ..stationary import sample_profile


def trap(f, x):
    return float(np.trapezoid(f, x))


@dataclass(frozen=True, eq=False)
class SnapshotFields:
    t: float
    x: np.ndarray
    r: np.ndarray
    v: np.ndarray
    u: np.ndarray
    rho_t: np.ndarray
    u_t: np.ndarray
    drho_t: np.ndarray
    du_t: np.ndarray
    ddrho_t: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    psi_x: np.ndarray
    G: np.ndarray
    B: float
    M: float

    @property
    def v_t(self):
        return 1.0 / self.rho_t


def snapshot_fields(snap, profile, params):
    r = np.minimum(snap.r, profile.r_max)
    rho_t, u_t, drho_t, du_t, ddrho_t = sample_profile(profile, r)
    x = snap.x
    phi = snap.v - 1.0 / rho_t
    psi = snap.u - u_t
    G = np.asarray(energy_distance_G(snap.v, 1.0 / rho_t, params))
    return SnapshotFields(snap.t, x, snap.r, snap.v, snap.u, rho_t, u_t, drho_t, du_t, ddrho_t,
                          phi, psi, fd_first(psi, x), G, snap.B, snap.M)
