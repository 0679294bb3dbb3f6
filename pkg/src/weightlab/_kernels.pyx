# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled set-basis kernels.

Every routine takes a basis in CSR layout (``indptr``/``indices``: set ``k``
owns ``indices[indptr[k]:indptr[k + 1]]``) and a batch of functions stored as
rows of a C-contiguous ``(K, N)`` float64 array.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs, INFINITY

cnp.import_array()


def set_sums(const double[:, ::1] vals, const double[::1] mass,
             const long long[::1] indptr, const long long[::1] indices):
    cdef Py_ssize_t K = vals.shape[0], S = indptr.shape[0] - 1
    cdef Py_ssize_t k, u, e
    out_arr = np.zeros((K, S), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double acc
    for k in range(K):
        for u in range(S):
            acc = 0.0
            for e in range(indptr[u], indptr[u + 1]):
                acc += vals[k, indices[e]] * mass[indices[e]]
            out[k, u] = acc
    return out_arr


def set_lp_norms(const double[:, ::1] vals, const double[::1] mass,
                 const long long[::1] indptr, const long long[::1] indices,
                 double recip):
    cdef Py_ssize_t K = vals.shape[0], S = indptr.shape[0] - 1
    cdef Py_ssize_t k, u, e
    cdef double top, acc, a, expo
    out_arr = np.zeros((K, S), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    expo = 1.0 / recip if recip > 0 else 0.0
    for k in range(K):
        for u in range(S):
            top = 0.0
            for e in range(indptr[u], indptr[u + 1]):
                a = fabs(vals[k, indices[e]])
                if a > top:
                    top = a
            if recip == 0.0 or top == 0.0:
                out[k, u] = top
                continue
            acc = 0.0
            for e in range(indptr[u], indptr[u + 1]):
                acc += pow(fabs(vals[k, indices[e]]) / top, expo) * mass[indices[e]]
            out[k, u] = top * pow(acc, recip)
    return out_arr


def scatter_max(const double[:, ::1] setvals, const long long[::1] indptr,
                const long long[::1] indices, Py_ssize_t n):
    cdef Py_ssize_t K = setvals.shape[0], S = indptr.shape[0] - 1
    cdef Py_ssize_t k, u, e, x
    cdef double val
    out_arr = np.full((K, n), -INFINITY, dtype=np.float64)
    arg_arr = np.full((K, n), -1, dtype=np.int64)
    cdef double[:, ::1] out = out_arr
    cdef long long[:, ::1] arg = arg_arr
    for k in range(K):
        for u in range(S):
            val = setvals[k, u]
            for e in range(indptr[u], indptr[u + 1]):
                x = indices[e]
                if val > out[k, x]:
                    out[k, x] = val
                    arg[k, x] = u
    return out_arr, arg_arr


def scatter_add(const double[:, ::1] setvals, const long long[::1] indptr,
                const long long[::1] indices, Py_ssize_t n):
    cdef Py_ssize_t K = setvals.shape[0], S = indptr.shape[0] - 1
    cdef Py_ssize_t k, u, e
    cdef double val
    out_arr = np.zeros((K, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for k in range(K):
        for u in range(S):
            val = setvals[k, u]
            if val == 0.0:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                out[k, indices[e]] += val
    return out_arr
