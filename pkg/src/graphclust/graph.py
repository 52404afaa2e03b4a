"""Attributed graph container, GCN normalization, and label statistics."""

from __future__ import annotations

import warnings
from typing import Iterator, Optional

import numpy as np

from .errors import AllIsolated, MissingLabels, ShapeMismatch
from .sparse import CSRMatrix, csr_from_coo, csr_from_dense


class Graph:
    """Immutable undirected attributed graph.

    The adjacency is a binary symmetric CSR matrix with no stored
    self-loops; each undirected edge appears as two directed entries.
    Labels, when present, are cluster indices in [0, num_classes).
    """

    __slots__ = ("features", "adjacency", "labels", "num_classes", "_features_csr")

    def __init__(
        self,
        features: np.ndarray,
        adjacency: CSRMatrix,
        labels: Optional[np.ndarray] = None,
        num_classes: Optional[int] = None,
    ):
        features = np.ascontiguousarray(features)
        if features.ndim != 2:
            raise ShapeMismatch("features must be a 2-D matrix")
        n = features.shape[0]
        if adjacency.shape != (n, n):
            raise ShapeMismatch(
                f"adjacency is {adjacency.shape}, expected ({n}, {n})"
            )
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite entries")
        if adjacency.data is not None:
            raise ValueError("adjacency must be binary (data is None)")
        rows, cols = adjacency.coo()
        if np.any(rows == cols):
            raise ValueError("adjacency stores self-loops")
        if not adjacency.is_symmetric():
            raise ValueError("adjacency is not symmetric")
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ShapeMismatch("labels length does not match node count")
            if num_classes is None:
                num_classes = int(labels.max()) + 1 if n else 0
            if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
                raise ValueError("labels out of range [0, num_classes)")
        self.features = features
        self.adjacency = adjacency
        self.labels = labels
        self.num_classes = num_classes
        self._features_csr = None

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges_undirected(self) -> int:
        return self.adjacency.nnz // 2

    def features_csr(self) -> CSRMatrix:
        """Sparse view of the feature matrix (built once, cached)."""
        if self._features_csr is None:
            self._features_csr = csr_from_dense(self.features)
        return self._features_csr

    def feature_density(self) -> float:
        size = self.features.size
        return self.features_csr().nnz / size if size else 1.0


def graph_from_edges(
    features: np.ndarray,
    src: np.ndarray,
    dst: np.ndarray,
    labels: Optional[np.ndarray] = None,
    num_classes: Optional[int] = None,
) -> Graph:
    """Build a Graph from edge endpoint arrays.

    Edges may be listed in either or both directions; duplicates are
    merged and self-loops dropped with a warning.
    """
    n = features.shape[0]
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if src.shape != dst.shape:
        raise ShapeMismatch("src and dst lengths differ")
    if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
        raise ValueError("edge endpoint out of range")
    loops = src == dst
    if np.any(loops):
        warnings.warn(f"dropping {int(loops.sum())} self-loop(s)", stacklevel=2)
        src, dst = src[~loops], dst[~loops]
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0) if src.size else np.empty((0, 2), dtype=np.int64)
    adjacency = symmetric_csr(n, pairs[:, 0], pairs[:, 1])
    return Graph(features, adjacency, labels, num_classes)


def symmetric_csr(n: int, lo: np.ndarray, hi: np.ndarray) -> CSRMatrix:
    """Binary symmetric CSR from canonical (lo < hi) undirected pairs."""
    rows = np.concatenate([lo, hi])
    cols = np.concatenate([hi, lo])
    return csr_from_coo((n, n), rows, cols)


class NormalizedAdjacency:
    """Symmetrically normalized adjacency with self-loops inserted.

    Entry (i, j) equals 1/sqrt(dhat_i * dhat_j) where dhat counts
    neighbors plus the inserted self-loop.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix: CSRMatrix):
        self.matrix = matrix

    @property
    def shape(self):
        return self.matrix.shape


def normalize_adjacency(
    adjacency_or_graph, dtype=np.float64
) -> NormalizedAdjacency:
    """Insert one self-loop per node and normalize by degree symmetrically."""
    a = (
        adjacency_or_graph.adjacency
        if isinstance(adjacency_or_graph, Graph)
        else adjacency_or_graph
    )
    n = a.shape[0]
    dhat = (a.row_degrees() + 1).astype(np.float64)
    rows, cols = a.coo()
    diag = np.arange(n, dtype=rows.dtype)
    rows = np.concatenate([rows, diag])
    cols = np.concatenate([cols, diag])
    vals = 1.0 / np.sqrt(dhat[rows] * dhat[cols])
    return NormalizedAdjacency(csr_from_coo((n, n), rows, cols, vals.astype(dtype)))


def node_homophily(g: Graph) -> float:
    """Mean over non-isolated nodes of the same-label neighbor fraction."""
    if g.labels is None:
        raise MissingLabels("node_homophily requires labels")
    deg = g.adjacency.row_degrees().astype(np.int64)
    if not np.any(deg > 0):
        raise AllIsolated("every node is isolated")
    rows, cols = g.adjacency.coo()
    same = (g.labels[rows] == g.labels[cols]).astype(np.float64)
    same_per_node = np.bincount(rows, weights=same, minlength=g.num_nodes)
    connected = deg > 0
    fractions = same_per_node[connected] / deg[connected]
    return float(fractions.mean())


def ideal_similarity_blocks(
    g: Graph, block_rows: int = 2048
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (row_start, block) of the same-label indicator matrix.

    Blocks are uint8 with shape (<=block_rows, n); the diagonal is all
    ones since every node shares its own label.
    """
    if g.labels is None:
        raise MissingLabels("ideal similarity matrix requires labels")
    labels = g.labels
    n = g.num_nodes
    for r0 in range(0, n, block_rows):
        r1 = min(r0 + block_rows, n)
        yield r0, (labels[r0:r1, None] == labels[None, :]).astype(np.uint8)


def ideal_similarity_matrix(g: Graph, block_rows: int = 2048) -> np.ndarray:
    """Materialize the full same-label indicator matrix (small graphs)."""
    n = g.num_nodes
    out = np.empty((n, n), dtype=np.uint8)
    for r0, block in ideal_similarity_blocks(g, block_rows):
        out[r0 : r0 + block.shape[0]] = block
    return out
