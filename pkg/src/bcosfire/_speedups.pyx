# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels.

Must stay bit-identical to ``_kernels_np``: same tap grouping, same
per-candidate single rounding. Built with -ffp-contract=off so the compiler
cannot fuse the multiply-adds that numpy performs as separate operations.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def correlate2d(double[:, ::1] padded, int r, double w_center,
                int[::1] kx, int[::1] ky, double[::1] w_orbit):
    cdef Py_ssize_t h = padded.shape[0] - 2 * r
    cdef Py_ssize_t w = padded.shape[1] - 2 * r
    cdef Py_ssize_t n = w_orbit.shape[0]
    cdef Py_ssize_t x, y, i
    cdef int a, b
    cdef double wt, t
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for y in range(h):
            for x in range(w):
                out[y, x] = w_center * padded[y + r, x + r]
        for i in range(n):
            a = kx[i]
            b = ky[i]
            wt = w_orbit[i]
            for y in range(h):
                for x in range(w):
                    # orbit (a,b), (-b,a), (-a,-b), (b,-a); opposite pairs first
                    t = (padded[y + r + b, x + r + a] + padded[y + r - b, x + r - a]) \
                        + (padded[y + r + a, x + r - b] + padded[y + r - a, x + r + b])
                    out[y, x] = out[y, x] + wt * t
    return out_arr


def wmax_h(double[:, ::1] a, double[::1] g):
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    cdef Py_ssize_t half = (g.shape[0] - 1) // 2
    cdef Py_ssize_t x, y, k, lo, hi
    cdef double m, c
    out_arr = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for y in range(h):
            for x in range(w):
                m = 0.0
                lo = x - half
                if lo < 0:
                    lo = 0
                hi = x + half
                if hi > w - 1:
                    hi = w - 1
                for k in range(lo, hi + 1):
                    # candidate a[y, k] * g[(x - k) + half], single rounding
                    c = a[y, k] * g[x - k + half]
                    if c > m:
                        m = c
                out[y, x] = m
    return out_arr


def wmax_v(double[:, ::1] a, double[::1] g):
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    cdef Py_ssize_t half = (g.shape[0] - 1) // 2
    cdef Py_ssize_t x, y, k, lo, hi
    cdef double m, c
    out_arr = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for y in range(h):
            lo = y - half
            if lo < 0:
                lo = 0
            hi = y + half
            if hi > h - 1:
                hi = h - 1
            for x in range(w):
                m = 0.0
                for k in range(lo, hi + 1):
                    c = a[k, x] * g[y - k + half]
                    if c > m:
                        m = c
                out[y, x] = m
    return out_arr
