"""Hot numeric kernels with a compiled core and a NumPy fallback.

The Cython extension (``graphclust._kernels._core``) fuses the inner loops
that dominate training time. If it is missing (source install without a
compiler) or ``GRAPHCLUST_NO_EXT`` is set, the NumPy implementations are
used instead; both expose the same two functions:

``spmm(indptr, indices, data, b, out=None)``
    CSR sparse times dense matrix product.

``sparsity_block(s_blk, row0, indptr, indices, split, tau, w_out)``
    For one row block of the pairwise cosine matrix: return the sum of
    sigmoid((S - split)/tau) over disconnected off-diagonal pairs and write
    the per-entry derivative into ``w_out`` (zero at edges and diagonal).
"""

import os

from . import _numpy as numpy_impl

ext_impl = None
if not os.environ.get("GRAPHCLUST_NO_EXT"):
    try:
        from . import _core as ext_impl  # type: ignore[no-redef]
    except ImportError:
        ext_impl = None

_active = ext_impl if ext_impl is not None else numpy_impl

spmm = _active.spmm
sparsity_block = _active.sparsity_block


def backend_name() -> str:
    return "extension" if _active is not numpy_impl else "numpy"
