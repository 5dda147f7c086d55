# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Every routine mirrors one function in ``_fallback``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()


def spmm(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
         const double[::1] data, const double[:, ::1] h):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t c = h.shape[1]
    cdef Py_ssize_t i, p, j, col
    cdef double v
    out = np.zeros((n, c), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            v = data[p]
            for col in range(c):
                o[i, col] += v * h[j, col]
    return out


def edge_distances(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                   const double[:, ::1] h):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t d = h.shape[1]
    cdef Py_ssize_t i, p, j, col
    cdef double acc, diff
    out = np.empty(indices.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            acc = 0.0
            for col in range(d):
                diff = h[i, col] - h[j, col]
                acc += diff * diff
            o[p] = sqrt(acc)
    return out


def inverse_kernel_means(const cnp.int64_t[::1] indptr, const double[::1] rho_norm,
                         double sigma):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, p
    cdef double acc, r
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            r = rho_norm[p]
            acc += 1.0 / exp(-(r * r) / sigma)
        o[i] = acc / <double>(indptr[i + 1] - indptr[i])
    return out


def pairwise_block(const double[:, ::1] xq, const double[:, ::1] x):
    cdef Py_ssize_t m = xq.shape[0]
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t a, b, col
    cdef double acc, diff
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    for a in range(m):
        for b in range(n):
            acc = 0.0
            for col in range(d):
                diff = xq[a, col] - x[b, col]
                acc += diff * diff
            o[a, b] = sqrt(acc)
    return out


def matmul(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t kk = a.shape[1]
    cdef Py_ssize_t n = b.shape[1]
    cdef Py_ssize_t i, k, j
    cdef double aik
    out = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(m):
        for k in range(kk):
            aik = a[i, k]
            for j in range(n):
                o[i, j] += aik * b[k, j]
    return out
