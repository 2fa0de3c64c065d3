# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-pixel row kernels.

Signatures mirror ``_kernels_py``. Each loop walks rows in order, so
reductions are deterministic.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt

cnp.import_array()


def stick_break_forward(const double[:, ::1] v):
    cdef Py_ssize_t p = v.shape[0], k = v.shape[1], i, j
    cdef double rest
    out = np.empty((p, k), dtype=np.float64)
    cdef double[:, ::1] s = out
    for i in range(p):
        rest = 1.0
        for j in range(k - 1):
            s[i, j] = v[i, j] * rest
            rest = rest * (1.0 - v[i, j])
        s[i, k - 1] = rest
    return out


def stick_break_backward(const double[:, ::1] v, const double[:, ::1] grad_s):
    cdef Py_ssize_t p = v.shape[0], k = v.shape[1], i, j
    cdef double g_rest
    out = np.zeros((p, k), dtype=np.float64)
    cdef double[:, ::1] gv = out
    cdef double[::1] rest = np.empty(k, dtype=np.float64)
    for i in range(p):
        rest[0] = 1.0
        for j in range(1, k):
            rest[j] = rest[j - 1] * (1.0 - v[i, j - 1])
        g_rest = grad_s[i, k - 1]
        for j in range(k - 2, -1, -1):
            gv[i, j] = (grad_s[i, j] - g_rest) * rest[j]
            g_rest = grad_s[i, j] * v[i, j] + g_rest * (1.0 - v[i, j])
    return out


def row_entropies(const double[:, ::1] s):
    cdef Py_ssize_t p = s.shape[0], k = s.shape[1], i, j
    cdef double total, q, h
    out = np.empty(p, dtype=np.float64)
    cdef double[::1] hs = out
    for i in range(p):
        total = 0.0
        for j in range(k):
            total += s[i, j]
        h = 0.0
        if total > 0.0:
            for j in range(k):
                q = s[i, j] / total
                if q > 0.0:
                    h -= q * log(q)
        hs[i] = h
    return out


def row_entropies_backward(const double[:, ::1] s, const double[::1] grad_rows):
    cdef Py_ssize_t p = s.shape[0], k = s.shape[1], i, j
    cdef double total, q, h
    out = np.zeros((p, k), dtype=np.float64)
    cdef double[:, ::1] g = out
    for i in range(p):
        total = 0.0
        for j in range(k):
            total += s[i, j]
        if total <= 0.0:
            continue
        h = 0.0
        for j in range(k):
            q = s[i, j] / total
            if q > 0.0:
                h -= q * log(q)
        for j in range(k):
            q = s[i, j] / total
            if q > 0.0:
                g[i, j] = grad_rows[i] * (-log(q) - h) / total
    return out


def row_norms(const double[:, ::1] x):
    cdef Py_ssize_t p = x.shape[0], c = x.shape[1], i, j
    cdef double acc
    out = np.empty(p, dtype=np.float64)
    cdef double[::1] n = out
    for i in range(p):
        acc = 0.0
        for j in range(c):
            acc += x[i, j] * x[i, j]
        n[i] = sqrt(acc)
    return out


def row_norms_backward(const double[:, ::1] x, const double[::1] grad_rows):
    cdef Py_ssize_t p = x.shape[0], c = x.shape[1], i, j
    cdef double acc, nrm
    out = np.zeros((p, c), dtype=np.float64)
    cdef double[:, ::1] g = out
    for i in range(p):
        acc = 0.0
        for j in range(c):
            acc += x[i, j] * x[i, j]
        nrm = sqrt(acc)
        if nrm > 0.0:
            for j in range(c):
                g[i, j] = grad_rows[i] * x[i, j] / nrm
    return out

