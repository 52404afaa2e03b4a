"""NumPy/SciPy reference implementations of the hot kernels."""

import numpy as np
import scipy.sparse as sp
from scipy.special import expit


def spmm(indptr, indices, data, b, out=None):
    """CSR sparse (given by its arrays) times dense ``b``."""
    n_rows = len(indptr) - 1
    m = sp.csr_matrix(
        (data.astype(b.dtype, copy=False), indices, indptr),
        shape=(n_rows, b.shape[0]),
    )
    r = m @ b
    if out is None:
        return r
    out[...] = r
    return out


def sparsity_block(s_blk, row0, indptr, indices, split, tau, w_out):
    """Sigmoid sum and derivative over disconnected pairs of one row block.

    ``s_blk`` holds rows [row0, row0+b) of the full pairwise similarity
    matrix. Returns sum of sigmoid((S - split)/tau) over entries that are
    neither stored edges nor diagonal; ``w_out`` receives
    sigmoid'((S - split)/tau)/tau at those entries and 0 elsewhere.
    """
    b, n = s_blk.shape
    sig = expit((s_blk - split) / tau)
    np.multiply(sig, 1.0 - sig, out=w_out)
    w_out /= tau
    total = float(sig.sum(dtype=np.float64))

    diag = np.arange(row0, min(row0 + b, n))
    local = diag - row0
    total -= float(sig[local, diag].sum(dtype=np.float64))
    w_out[local, diag] = 0.0

    lo, hi = indptr[row0], indptr[row0 + b]
    if hi > lo:
        cols = indices[lo:hi]
        rows_local = np.repeat(np.arange(b), np.diff(indptr[row0 : row0 + b + 1]))
        total -= float(sig[rows_local, cols].sum(dtype=np.float64))
        w_out[rows_local, cols] = 0.0
    return total
