# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the weight-assembly routines in fracnoether._kernels.

Profiles and entries are computed with the same expression trees as the numpy
fallback ((w[g] + w[g+1]) * 0.5, (b[g+1] - b[g]) / h, ...) and the same libm
pow, so the two backends produce bit-identical matrices.
"""

from libc.math cimport pow

import numpy as np


def integral_weights(Py_ssize_t n, double h, double alpha, double ga1):
    out_arr = np.zeros((n, n))
    cdef double[:, ::1] out = out_arr
    p_arr = np.zeros(n)
    w_arr = np.zeros(n)
    v_arr = np.zeros(n)
    cdef double[::1] p = p_arr
    cdef double[::1] w = w_arr
    cdef double[::1] v = v_arr
    cdef Py_ssize_t g, k, j
    cdef double half_w1
    for g in range(n):
        p[g] = pow(g * h, alpha)
    for g in range(1, n):
        w[g] = (p[g] - p[g - 1]) / ga1
    for g in range(1, n - 1):
        v[g] = (w[g + 1] + w[g]) * 0.5
    half_w1 = (0.0 + w[1]) * 0.5 if n > 1 else 0.0
    for k in range(1, n):
        for j in range(1, k):
            out[k, j] = v[k - j]
        out[k, 0] = (w[k] + 0.0) * 0.5
        out[k, k] = half_w1
    return out_arr


def l1_weights(Py_ssize_t n, double h, double alpha, double g2):
    cdef double e = 1.0 - alpha
    out_arr = np.zeros((n, n))
    cdef double[:, ::1] out = out_arr
    q_arr = np.zeros(n)
    b_arr = np.zeros(n + 1)
    u_arr = np.zeros(n)
    cdef double[::1] q = q_arr
    cdef double[::1] b = b_arr
    cdef double[::1] u = u_arr
    cdef Py_ssize_t g, k, j
    cdef double diag
    for g in range(n):
        q[g] = pow(g * h, e)
    for g in range(1, n):
        b[g] = (q[g] - q[g - 1]) / g2
    for g in range(1, n - 1):
        u[g] = (b[g + 1] - b[g]) / h
    diag = (b[1] - 0.0) / h if n > 1 else 0.0
    for k in range(1, n):
        for j in range(1, k):
            out[k, j] = u[k - j]
        out[k, 0] = (0.0 - b[k]) / h
        out[k, k] = diag
    return out_arr
