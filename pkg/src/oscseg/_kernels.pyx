# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled regression kernels: fused basis evaluation, residual sums and
normal-equation accumulation. Hot path of every MCMC move."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925286766559


def design_matrix(double[::1] t, double[::1] omega):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = omega.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, 2 * m + 2))
    cdef double[:, ::1] X = out
    cdef Py_ssize_t i, l
    cdef double a
    for i in range(n):
        X[i, 0] = 1.0
        X[i, 1] = t[i]
        for l in range(m):
            a = TWO_PI * omega[l] * t[i]
            X[i, 2 + 2 * l] = cos(a)
            X[i, 3 + 2 * l] = sin(a)
    return out


def signal_eval(double[::1] t, double[::1] omega, double[::1] beta):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = omega.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] f = out
    cdef Py_ssize_t i, l
    cdef double a, acc
    with nogil:
        for i in range(n):
            acc = beta[0] + beta[1] * t[i]
            for l in range(m):
                a = TWO_PI * omega[l] * t[i]
                acc += beta[2 + 2 * l] * cos(a) + beta[3 + 2 * l] * sin(a)
            f[i] = acc
    return out


def rss_value(double[::1] y, double[::1] t, double[::1] omega, double[::1] beta):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = omega.shape[0]
    cdef Py_ssize_t i, l
    cdef double a, r, acc = 0.0
    with nogil:
        for i in range(n):
            r = y[i] - beta[0] - beta[1] * t[i]
            for l in range(m):
                a = TWO_PI * omega[l] * t[i]
                r -= beta[2 + 2 * l] * cos(a) + beta[3 + 2 * l] * sin(a)
            acc += r * r
    return acc


def xtx_xty(double[::1] y, double[::1] t, double[::1] omega):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = omega.shape[0]
    cdef Py_ssize_t d = 2 * m + 2
    cdef cnp.ndarray[cnp.float64_t, ndim=2] xtx_arr = np.zeros((d, d))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xty_arr = np.zeros(d)
    cdef double[:, ::1] xtx = xtx_arr
    cdef double[::1] xty = xty_arr
    cdef double[::1] x = np.empty(d)
    cdef Py_ssize_t i, l, p, q
    cdef double a
    with nogil:
        for i in range(n):
            x[0] = 1.0
            x[1] = t[i]
            for l in range(m):
                a = TWO_PI * omega[l] * t[i]
                x[2 + 2 * l] = cos(a)
                x[3 + 2 * l] = sin(a)
            for p in range(d):
                xty[p] += x[p] * y[i]
                for q in range(p, d):
                    xtx[p, q] += x[p] * x[q]
        for p in range(d):
            for q in range(p + 1, d):
                xtx[q, p] = xtx[p, q]
    return xtx_arr, xty_arr
