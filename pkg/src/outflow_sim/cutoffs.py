"""Cut-off functions used to localize estimates and blend initial data."""

import numpy as np


def phi_m(r, m):
    """C^3 bump: 1 on [0, m/2], 0 on [m, inf), septic smoothstep between."""
    z = np.clip((np.asarray(r, dtype=float) - 0.5 * m) / (0.5 * m), 0.0, 1.0)
    step = z ** 4 * (35.0 - 84.0 * z + 70.0 * z ** 2 - 20.0 * z ** 3)
    return 1.0 - step


def phi_m_derivative(r, m, order=1):
    """Derivatives of phi_m up to order 3."""
    h = 0.5 * m
    z = (np.asarray(r, dtype=float) - h) / h
    inside = (z > 0) & (z < 1)
    z = np.clip(z, 0.0, 1.0)
    if order == 1:
        d = 140.0 * z ** 3 * (1.0 - z) ** 3
    elif order == 2:
        d = 420.0 * z ** 2 * (1.0 - z) ** 2 * (1.0 - 2.0 * z)
    elif order == 3:
        d = 840.0 * z * (1.0 - z) * (1.0 - 5.0 * z + 5.0 * z ** 2)
    else:
        raise ValueError("order must be 1, 2 or 3")
    return np.where(inside, -d / h ** order, 0.0)


def eta_tilde(y):
    y = np.asarray(y, dtype=float)
    return np.select(
        [y <= -1.0, y <= -0.5, y <= 0.0],
        [1.0, 1.0 - 2.0 * (y + 1.0) ** 2, 2.0 * y ** 2],
        0.0,
    )


def eta_tilde_prime(y):
    y = np.asarray(y, dtype=float)
    return np.select(
        [y <= -1.0, y <= -0.5, y <= 0.0],
        [0.0, -4.0 * (y + 1.0), 4.0 * y],
        0.0,
    )


def zeta(y, B_t, k):
    """zeta_{k,t}: 1 up to B+k, linear down to 0 on [B+k, B+k+1]."""
    y = np.asarray(y, dtype=float)
    return np.clip(1.0 - (y - B_t - k), 0.0, 1.0)


def zeta_prime(y, B_t, k):
    y = np.asarray(y, dtype=float)
    inside = (y > B_t + k) & (y < B_t + k + 1.0)
    return np.where(inside, -1.0, 0.0)


def xi(y, M_t, k):
    """xi_{k,t}: 0 up to M-k-1, linear up to 1 on [M-k-1, M-k]."""
    y = np.asarray(y, dtype=float)
    return np.clip(y - (M_t - k - 1.0), 0.0, 1.0)


def xi_prime(y, M_t, k):
    y = np.asarray(y, dtype=float)
    inside = (y > M_t - k - 1.0) & (y < M_t - k)
    return np.where(inside, 1.0, 0.0)


def eta(r, r_M0):
    """eta(x, t) = eta_tilde(R(x,t) - R(M0,t)) given the radius field."""
    return eta_tilde(np.asarray(r, dtype=float) - r_M0)


def chi(r, r_M0):
    """chi_m(r, t) = eta_tilde(r - R_m(M0, t))."""
    return eta_tilde(np.asarray(r, dtype=float) - r_M0)


def chi_prime(r, r_M0):
    return eta_tilde_prime(np.asarray(r, dtype=float) - r_M0)
