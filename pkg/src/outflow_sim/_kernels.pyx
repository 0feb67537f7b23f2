# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-stage kernels; same signatures as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cbrt, pow, sqrt

cnp.import_array()


def radius(const double[::1] x, const double[::1] v, int n):
    cdef Py_ssize_t N = x.shape[0], i
    out = np.empty(N)
    cdef double[::1] r = out
    cdef double vol = 0.0, inv = 1.0 / n
    r[0] = 1.0
    for i in range(1, N):
        vol += 0.5 * (v[i] + v[i - 1]) * (x[i] - x[i - 1])
        if n == 2:
            r[i] = sqrt(1.0 + 2.0 * vol)
        elif n == 3:
            r[i] = cbrt(1.0 + 3.0 * vol)
        else:
            r[i] = pow(1.0 + n * vol, inv)
    return out


cdef inline double _ipow(double a, int k) nogil:
    cdef double out = 1.0
    cdef int j
    for j in range(k):
        out *= a
    return out


def explicit_terms(const double[::1] x, const double[::1] r, const double[::1] v, const double[::1] u,
                   const double[::1] w, int n, double K, double gamma):
    cdef Py_ssize_t N = x.shape[0], i
    ev_arr = np.zeros(N)
    eu_arr = np.zeros(N)
    g_arr = np.empty(N)
    p_arr = np.empty(N)
    F_arr = np.empty(N - 1)
    cdef double[::1] ev = ev_arr, eu = eu_arr, g = g_arr, p = p_arr, F = F_arr
    cdef double h1, h2, a, b, c, du, dp, vs, wx, Hl, Hr
    for i in range(N):
        g[i] = _ipow(r[i], n - 1) * u[i]
        p[i] = K * pow(v[i], -gamma)
    with nogil:
        # volume in flux form so the trapezoid sum telescopes; v fixed at the right end
        wx = (w[N - 1] - w[0]) / (x[N - 1] - x[0])
        for i in range(N - 2):
            vs = v[i + 1]
            if i < N - 3:
                vs += (v[i + 1] - v[i + 2]) * (x[i + 1] - x[i]) / (2.0 * (x[i + 2] - x[i + 1]))
            F[i] = 0.5 * (g[i] + g[i + 1]) + 0.5 * (w[i] + w[i + 1]) * vs
        Hr = 0.5 * (x[N - 1] - x[N - 2])
        F[N - 2] = g[N - 1] + w[N - 1] * v[N - 1] - Hr * wx * v[N - 1]
        Hl = 0.5 * (x[1] - x[0])
        ev[0] = (F[0] - g[0] - w[0] * v[0]) / Hl - wx * v[0]
        for i in range(1, N - 1):
            ev[i] = (F[i] - F[i - 1]) / (0.5 * (x[i + 1] - x[i - 1])) - wx * v[i]
        for i in range(1, N - 1):
            h1 = x[i] - x[i - 1]
            h2 = x[i + 1] - x[i]
            a = -h2 / (h1 * (h1 + h2))
            b = (h2 - h1) / (h1 * h2)
            c = h1 / (h2 * (h1 + h2))
            dp = a * p[i - 1] + b * p[i] + c * p[i + 1]
            if i <= N - 3:
                h1 = x[i + 1] - x[i]
                h2 = x[i + 2] - x[i + 1]
                a = -(2 * h1 + h2) / (h1 * (h1 + h2))
                b = (h1 + h2) / (h1 * h2)
                c = -h1 / (h2 * (h1 + h2))
                du = a * u[i] + b * u[i + 1] + c * u[i + 2]
            else:
                du = a * u[i - 1] + b * u[i] + c * u[i + 1]
            eu[i] = -_ipow(r[i], n - 1) * dp + w[i] * du
    return ev_arr, eu_arr


def viscous_coeffs(const double[::1] x, const double[::1] r, const double[::1] v, int n, double mu):
    cdef Py_ssize_t N = x.shape[0], i
    lo_arr = np.zeros(N)
    di_arr = np.zeros(N)
    up_arr = np.zeros(N)
    cdef double[::1] lo = lo_arr, di = di_arr, up = up_arr
    cdef double kl, kr, c, hl, hr, rm, ri, rp
    with nogil:
        for i in range(1, N - 1):
            hl = x[i] - x[i - 1]
            hr = x[i + 1] - x[i]
            kl = 1.0 / (hl * 0.5 * (v[i] + v[i - 1]))
            kr = 1.0 / (hr * 0.5 * (v[i + 1] + v[i]))
            rm = _ipow(r[i - 1], n - 1)
            ri = _ipow(r[i], n - 1)
            rp = _ipow(r[i + 1], n - 1)
            c = mu * ri * 2.0 / (hl + hr)
            lo[i] = c * rm * kl
            up[i] = c * rp * kr
            di[i] = -c * ri * (kl + kr)
    return lo_arr, di_arr, up_arr


def apply_tridiag(const double[::1] lo, const double[::1] di, const double[::1] up, const double[::1] u):
    cdef Py_ssize_t N = u.shape[0], i
    out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(N):
            out[i] = di[i] * u[i]
            if i > 0:
                out[i] += lo[i] * u[i - 1]
            if i < N - 1:
                out[i] += up[i] * u[i + 1]
    return out_arr


def solve_shifted(const double[::1] lo, const double[::1] di, const double[::1] up, const double[::1] rhs,
                  double coef, double left, double right):
    """Thomas algorithm for (I - coef L) u = rhs with Dirichlet ends."""
    cdef Py_ssize_t N = rhs.shape[0], i
    out_arr = np.empty(N)
    cp_arr = np.empty(N)
    cdef double[::1] out = out_arr, cp = cp_arr
    cdef double a, b, c, m, d
    with nogil:
        # row 0 is the identity
        cp[0] = 0.0
        out[0] = left
        for i in range(1, N - 1):
            a = -coef * lo[i]
            b = 1.0 - coef * di[i]
            c = -coef * up[i]
            m = b - a * cp[i - 1]
            cp[i] = c / m
            out[i] = (rhs[i] - a * out[i - 1]) / m
        out[N - 1] = right
        for i in range(N - 2, 0, -1):
            out[i] -= cp[i] * out[i + 1]
    return out_arr
