# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot loop.

Mirrors _simplex_py.simplex_iterate pivot for pivot (same entering and
leaving rules, same arithmetic order), so either kernel can back lp.solve.
"""

import numpy as np

cimport numpy as cnp


def simplex_iterate(double[:, ::1] T, cnp.int64_t[::1] basis, Py_ssize_t n_entering,
                    long max_iters, double tol):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t ncols = T.shape[1]
    cdef Py_ssize_t it, i, j, q, p
    cdef double best, ratio, piv, f

    for it in range(max_iters):
        q = -1
        for j in range(n_entering):
            if T[m, j] < -tol:
                q = j
                break
        if q < 0:
            return 0, it

        p = -1
        best = 0.0
        for i in range(m):
            if T[i, q] > tol:
                ratio = T[i, ncols - 1] / T[i, q]
                if p < 0 or ratio < best or (ratio == best and basis[i] < basis[p]):
                    p = i
                    best = ratio
        if p < 0:
            return 1, it

        piv = T[p, q]
        for j in range(ncols):
            T[p, j] /= piv
        for i in range(m + 1):
            if i == p:
                continue
            f = T[i, q]
            if f != 0.0:
                for j in range(ncols):
                    T[i, j] -= f * T[p, j]
        basis[p] = q
    return 2, max_iters
