# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, INFINITY

cnp.import_array()


def suffix_max(x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double cur = -INFINITY
    cdef Py_ssize_t i
    for i in range(n - 1, -1, -1):
        if a[i] > cur:
            cur = a[i]
        out[i] = cur
    return out


def upper_hull(x, y):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ys = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=1] idx = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t k, i, j
    cdef double cross
    for k in range(n):
        while top >= 2:
            i = idx[top - 2]
            j = idx[top - 1]
            cross = (xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i])
            if cross >= 0.0:
                top -= 1
            else:
                break
        idx[top] = k
        top += 1
    return idx[:top].copy()


def minform_sup(vals, s, t, double alpha):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(vals, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t ns = sv.shape[0]
    cdef Py_ssize_t nt = tv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sa = np.empty(ns)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nt)
    cdef Py_ssize_t j, k
    cdef double tk, tp, w, best, cand
    for j in range(ns):
        sa[j] = pow(sv[j], -alpha)
    for k in range(nt):
        tk = tv[k]
        tp = pow(tk, 1.0 - alpha)
        best = -INFINITY
        for j in range(ns):
            w = tk * sa[j]
            if tp < w:
                w = tp
            cand = v[j] * w
            if cand > best:
                best = cand
        out[k] = best
    return out


def window_sup_integral(u, w):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef Py_ssize_t i, k
    cdef double run, acc
    for k in range(1, n):
        run = uv[k]
        acc = 0.0
        for i in range(k - 1, -1, -1):
            if uv[i] > run:
                run = uv[i]
            acc += wv[i] * run
        out[k] = acc
    return out
