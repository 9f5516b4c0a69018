# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting and scoring kernels.

Mirrors ``_kernels_py`` exactly; the two are checked against each other in
the test suite.
"""

import numpy as np

from libc.math cimport lgamma, log
from libc.stdint cimport int64_t


def contingency(const int64_t[:, ::1] codes, const int64_t[::1] cols, const int64_t[::1] cards):
    cdef Py_ssize_t n = codes.shape[0]
    cdef Py_ssize_t k = cols.shape[0]
    cdef Py_ssize_t i, c
    cdef int64_t idx, size = 1
    for c in range(k):
        size *= cards[c]
    out = np.zeros(size, dtype=np.int64)
    cdef int64_t[::1] o = out
    for i in range(n):
        idx = 0
        for c in range(k):
            idx = idx * cards[c] + codes[i, cols[c]]
        o[idx] += 1
    return out


def bdeu_family(const int64_t[:, ::1] counts, double ess):
    cdef Py_ssize_t q = counts.shape[0]
    cdef Py_ssize_t r = counts.shape[1]
    cdef double a_j = ess / q
    cdef double a_jk = ess / (q * r)
    cdef double lg_aj = lgamma(a_j)
    cdef double lg_ajk = lgamma(a_jk)
    cdef double score = 0.0
    cdef int64_t n_j, n_jk
    cdef Py_ssize_t j, k
    for j in range(q):
        n_j = 0
        for k in range(r):
            n_jk = counts[j, k]
            n_j += n_jk
            if n_jk > 0:
                score += lgamma(a_jk + n_jk) - lg_ajk
        if n_j > 0:
            score += lg_aj - lgamma(a_j + n_j)
    return score


def g2_statistic(const int64_t[:, :, ::1] counts):
    cdef Py_ssize_t nz = counts.shape[0]
    cdef Py_ssize_t nx = counts.shape[1]
    cdef Py_ssize_t ny = counts.shape[2]
    cdef Py_ssize_t s, a, b
    cdef double stat = 0.0
    cdef int64_t n_s, o
    cdef int64_t nonzero = 0
    rows_arr = np.empty(nx, dtype=np.int64)
    cols_arr = np.empty(ny, dtype=np.int64)
    cdef int64_t[::1] rows = rows_arr
    cdef int64_t[::1] cols = cols_arr
    for s in range(nz):
        n_s = 0
        for a in range(nx):
            rows[a] = 0
        for b in range(ny):
            cols[b] = 0
        for a in range(nx):
            for b in range(ny):
                o = counts[s, a, b]
                rows[a] += o
                cols[b] += o
                n_s += o
        if n_s == 0:
            continue
        nonzero += 1
        for a in range(nx):
            for b in range(ny):
                o = counts[s, a, b]
                if o > 0:
                    stat += o * log(<double>o * n_s / (<double>rows[a] * cols[b]))
    return 2.0 * stat, nonzero
