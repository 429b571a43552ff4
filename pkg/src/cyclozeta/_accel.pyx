# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Euler-Maclaurin power sums, pairwise GCD-sum
rows, and the kernel-weighted coefficient pair sum.

Signatures mirror `cyclozeta._accel_py`; which module is used is decided
once, in `cyclozeta.backend`.
"""

import numpy as np

from libc.math cimport cos, exp, fabs, log, sin

BACKEND_NAME = "native"


def em_power_sum(s, double a, long m_terms):
    """sum_{n=0}^{m_terms-1} (n+a)^(-s) for each complex s."""
    cdef double complex[::1] sv = np.ascontiguousarray(s, dtype=np.complex128).ravel()
    out_arr = np.zeros(sv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out_arr
    cdef Py_ssize_t i, n
    cdef double lg, sigma, t, mag, re, im, cre, cim
    for i in range(sv.shape[0]):
        sigma = sv[i].real
        t = sv[i].imag
        re = 0.0
        im = 0.0
        cre = 0.0
        cim = 0.0
        for n in range(m_terms):
            lg = log(n + a)
            mag = exp(-sigma * lg)
            # Kahan-compensated accumulation of mag * e^{-i t lg}
            re, cre = _kadd(re, cre, mag * cos(t * lg))
            im, cim = _kadd(im, cim, -mag * sin(t * lg))
        ov[i] = re + 1j * im
    shaped = out_arr.reshape(np.shape(s))
    return shaped


cdef inline (double, double) _kadd(double s, double c, double x):
    cdef double y = x - c
    cdef double t = s + y
    return t, (t - s) - y


def gcd_pair_rows(expmat, logp, aktab, double sigma):
    """Strict-upper-triangle row sums of the weighted GCD double sum."""
    cdef long[:, ::1] em = np.ascontiguousarray(expmat, dtype=np.int64)
    cdef double[::1] lp = np.ascontiguousarray(logp, dtype=np.float64)
    cdef double[:, ::1] ak = np.ascontiguousarray(aktab, dtype=np.float64)
    cdef Py_ssize_t n = em.shape[0], nprimes = em.shape[1]
    rows_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] rows = rows_arr
    cdef Py_ssize_t i, j, k
    cdef long dk
    cdef double logratio, weight, acc, comp, term
    for i in range(n - 1):
        acc = 0.0
        comp = 0.0
        for j in range(i + 1, n):
            logratio = 0.0
            weight = 1.0
            for k in range(nprimes):
                dk = em[j, k] - em[i, k]
                if dk > 0:
                    logratio += dk * lp[k]
                    weight *= ak[k, dk]
                elif dk < 0:
                    logratio -= dk * lp[k]
                    weight *= ak[k, -dk]
            term = weight * exp(-sigma * logratio)
            acc, comp = _kadd(acc, comp, term)
        rows[i] = acc
    return rows_arr


def e_series_pair_sum(u, w):
    """sum over pairs n*m <= X of u[n] * conj(u[m]) * w[n*m]."""
    cdef double complex[::1] uv = np.ascontiguousarray(u, dtype=np.complex128)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t x = uv.shape[0] - 1
    cdef Py_ssize_t n, m
    cdef double complex acc = 0.0, un
    for n in range(1, x + 1):
        un = uv[n]
        if un == 0.0:
            continue
        for m in range(1, x // n + 1):
            acc = acc + un * wv[n * m] * uv[m].conjugate()
    return complex(acc)
