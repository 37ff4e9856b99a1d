# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled solver kernels; mirrors triwell.kernels._numpy exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

NAME = "compiled"


def constitutive_sweep(double[:, ::1] e6, double[:, ::1] wells_diag,
                       double lam_e, double mu_e, double kT):
    """See triwell.kernels._numpy.constitutive_sweep."""
    cdef Py_ssize_t m = e6.shape[0]
    cdef Py_ssize_t i, a
    cdef double d0, d1, d2, tr, d_off, eng, emin, z, w0, w1, w2
    cdef double a0, a1, a2
    cdef double[3] ener

    chi_arr = np.empty((m, 3))
    tau_arr = np.empty((m, 3))
    est_arr = np.empty(m)
    cdef double[:, ::1] chi = chi_arr
    cdef double[:, ::1] tau = tau_arr
    cdef double[::1] est = est_arr

    for i in range(m):
        d_off = e6[i, 3] * e6[i, 3] + e6[i, 4] * e6[i, 4] + e6[i, 5] * e6[i, 5]
        emin = 0.0
        for a in range(3):
            d0 = e6[i, 0] - wells_diag[a, 0]
            d1 = e6[i, 1] - wells_diag[a, 1]
            d2 = e6[i, 2] - wells_diag[a, 2]
            tr = d0 + d1 + d2
            eng = 0.5 * lam_e * tr * tr + mu_e * (d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * d_off)
            ener[a] = eng
            if a == 0 or eng < emin:
                emin = eng
        w0 = exp(-(ener[0] - emin) / kT)
        w1 = exp(-(ener[1] - emin) / kT)
        w2 = exp(-(ener[2] - emin) / kT)
        z = w0 + w1 + w2
        chi[i, 0] = w0 / z
        chi[i, 1] = w1 / z
        chi[i, 2] = w2 / z
        est[i] = emin - kT * log(z)
        a0 = chi[i, 0] * wells_diag[0, 0] + chi[i, 1] * wells_diag[1, 0] + chi[i, 2] * wells_diag[2, 0]
        a1 = chi[i, 0] * wells_diag[0, 1] + chi[i, 1] * wells_diag[1, 1] + chi[i, 2] * wells_diag[2, 1]
        a2 = chi[i, 0] * wells_diag[0, 2] + chi[i, 1] * wells_diag[1, 2] + chi[i, 2] * wells_diag[2, 2]
        tr = a0 + a1 + a2
        tau[i, 0] = lam_e * tr + 2.0 * mu_e * a0
        tau[i, 1] = lam_e * tr + 2.0 * mu_e * a1
        tau[i, 2] = lam_e * tr + 2.0 * mu_e * a2
    return chi_arr, tau_arr, est_arr


def green_sweep(tau_hat, double[:, ::1] k, double lam_e, double mu_e, ebar6):
    """See triwell.kernels._numpy.green_sweep."""
    cdef Py_ssize_t m = k.shape[0]
    cdef Py_ssize_t i
    cdef bint diag = tau_hat.shape[1] == 3
    cdef double complex[:, ::1] th = np.ascontiguousarray(tau_hat, dtype=complex)
    cdef double ksq, coef = (lam_e + mu_e) / (lam_e + 2.0 * mu_e)
    cdef double k0, k1, k2
    cdef double complex t0, t1, t2, kt, u0, u1, u2
    cdef cnp.ndarray ebar_arr = np.asarray(ebar6, dtype=complex)
    cdef double complex[::1] eb = ebar_arr

    out_arr = np.empty((m, 6), dtype=complex)
    cdef double complex[:, ::1] out = out_arr

    for i in range(m):
        k0 = k[i, 0]
        k1 = k[i, 1]
        k2 = k[i, 2]
        ksq = k0 * k0 + k1 * k1 + k2 * k2
        if ksq == 0.0:
            out[i, 0] = eb[0]
            out[i, 1] = eb[1]
            out[i, 2] = eb[2]
            out[i, 3] = eb[3]
            out[i, 4] = eb[4]
            out[i, 5] = eb[5]
            continue
        if diag:
            t0 = th[i, 0] * k0
            t1 = th[i, 1] * k1
            t2 = th[i, 2] * k2
        else:
            t0 = th[i, 0] * k0 + th[i, 5] * k1 + th[i, 4] * k2
            t1 = th[i, 5] * k0 + th[i, 1] * k1 + th[i, 3] * k2
            t2 = th[i, 4] * k0 + th[i, 3] * k1 + th[i, 2] * k2
        kt = (k0 * t0 + k1 * t1 + k2 * t2) / ksq
        u0 = (t0 - coef * kt * k0) / (mu_e * ksq)
        u1 = (t1 - coef * kt * k1) / (mu_e * ksq)
        u2 = (t2 - coef * kt * k2) / (mu_e * ksq)
        out[i, 0] = u0 * k0
        out[i, 1] = u1 * k1
        out[i, 2] = u2 * k2
        out[i, 3] = 0.5 * (u1 * k2 + u2 * k1)
        out[i, 4] = 0.5 * (u0 * k2 + u2 * k0)
        out[i, 5] = 0.5 * (u0 * k1 + u1 * k0)
    return out_arr
