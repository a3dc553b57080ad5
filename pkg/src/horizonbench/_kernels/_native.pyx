# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: the hot sequential loops of the ARMA fitter.

Mirrors ``_pure`` exactly; see that module for the contracts.
"""

from libc.math cimport log, isfinite

import numpy as np

BACKEND = "native"

BACKEND_DOC = "Cython state-space kernels"


def arma_innovation_stats(x, T, Q, P0):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] Tm = np.ascontiguousarray(T, dtype=np.float64)
    cdef double[:, ::1] Qm = np.ascontiguousarray(Q, dtype=np.float64)
    cdef double[:, ::1] P = np.array(P0, dtype=np.float64, order="C", copy=True)

    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t r = Tm.shape[0]
    cdef double[::1] a = np.zeros(r)
    cdef double[::1] anew = np.zeros(r)
    cdef double[::1] k = np.zeros(r)
    cdef double[:, ::1] TP = np.zeros((r, r))
    cdef double[:, ::1] Pnew = np.zeros((r, r))

    cdef double sum_log_f = 0.0
    cdef double sum_v2f = 0.0
    cdef double v, f, acc
    cdef Py_ssize_t t, i, j, m

    for t in range(n):
        v = xv[t] - a[0]
        f = P[0, 0]
        if not isfinite(f) or f < 1e-12:
            return 0.0, 0.0, False
        sum_log_f += log(f)
        sum_v2f += v * v / f

        # k = T @ P[:, 0] / f
        for i in range(r):
            acc = 0.0
            for j in range(r):
                acc += Tm[i, j] * P[j, 0]
            k[i] = acc / f

        # a = T @ a + k * v
        for i in range(r):
            acc = 0.0
            for j in range(r):
                acc += Tm[i, j] * a[j]
            anew[i] = acc + k[i] * v
        for i in range(r):
            a[i] = anew[i]

        # P = T P T' + Q - f * k k', symmetrized
        for i in range(r):
            for j in range(r):
                acc = 0.0
                for m in range(r):
                    acc += Tm[i, m] * P[m, j]
                TP[i, j] = acc
        for i in range(r):
            for j in range(r):
                acc = 0.0
                for m in range(r):
                    acc += TP[i, m] * Tm[j, m]
                Pnew[i, j] = acc + Qm[i, j] - f * k[i] * k[j]
        for i in range(r):
            for j in range(r):
                P[i, j] = 0.5 * (Pnew[i, j] + Pnew[j, i])

    return sum_log_f, sum_v2f, True


def css_residuals(x, phi, theta):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t p = ph.shape[0]
    cdef Py_ssize_t q = th.shape[0]
    out = np.zeros(n)
    cdef double[::1] e = out
    cdef double acc
    cdef Py_ssize_t t, i, j

    for t in range(p, n):
        acc = xv[t]
        for i in range(p):
            acc -= ph[i] * xv[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= 0:
                acc -= th[j] * e[t - 1 - j]
        e[t] = acc
    return out
