# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Fused Cython implementations of the hot kernels.

Semantics match graphclust._kernels._numpy; see that module for the
contracts. Accumulation runs in double precision regardless of the
input dtype.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

ctypedef fused floating:
    float
    double


cdef inline double _sigmoid(double u) noexcept nogil:
    if u >= 0.0:
        return 1.0 / (1.0 + exp(-u))
    cdef double e = exp(u)
    return e / (1.0 + e)


def spmm(cnp.int32_t[::1] indptr, cnp.int32_t[::1] indices,
         floating[::1] data, floating[:, ::1] b, out=None):
    cdef Py_ssize_t n_rows = indptr.shape[0] - 1
    cdef Py_ssize_t d = b.shape[1]
    if out is None:
        out = np.zeros((n_rows, d), dtype=np.asarray(b).dtype)
    else:
        out[...] = 0
    cdef floating[:, ::1] o = out
    cdef Py_ssize_t i, jj, k
    cdef cnp.int32_t col
    cdef floating v
    with nogil:
        for i in range(n_rows):
            for jj in range(indptr[i], indptr[i + 1]):
                col = indices[jj]
                v = data[jj]
                for k in range(d):
                    o[i, k] += v * b[col, k]
    return out


def sparsity_block(floating[:, ::1] s_blk, Py_ssize_t row0,
                   cnp.int32_t[::1] indptr, cnp.int32_t[::1] indices,
                   double split, double tau, floating[:, ::1] w_out):
    cdef Py_ssize_t b = s_blk.shape[0]
    cdef Py_ssize_t n = s_blk.shape[1]
    cdef double inv_tau = 1.0 / tau
    cdef double total = 0.0
    cdef double sg
    cdef Py_ssize_t i, j, jj
    with nogil:
        for i in range(b):
            for j in range(n):
                sg = _sigmoid((s_blk[i, j] - split) * inv_tau)
                total += sg
                w_out[i, j] = <floating> (sg * (1.0 - sg) * inv_tau)
            j = row0 + i
            if j < n:
                total -= _sigmoid((s_blk[i, j] - split) * inv_tau)
                w_out[i, j] = 0.0
            for jj in range(indptr[row0 + i], indptr[row0 + i + 1]):
                j = indices[jj]
                total -= _sigmoid((s_blk[i, j] - split) * inv_tau)
                w_out[i, j] = 0.0
    return total
