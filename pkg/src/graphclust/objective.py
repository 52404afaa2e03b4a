"""Training objective: self-alignment, neighbor alignment, and a sparsity
penalty on the pairwise similarity of disconnected nodes.

All three terms are means, so the trade-off weights transfer across graph
sizes. The pairwise similarity matrix is never materialized: the sparsity
term walks row blocks of z1 @ z2.T, accumulating the loss and the
gradient partials in one pass, which bounds memory at block_rows * n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import _kernels
from . import autodiff as ad
from .errors import EmptyEdgeSet, NoDisconnectedPairs, ShapeMismatch
from .graph import Graph
from .sparse import CSRMatrix


@dataclass(frozen=True)
class LossConfig:
    split: float = 0.6
    tau: float = 0.1
    lam: float = 1.0
    gamma: float = 1.0
    block_rows: int = 2048
    # Escape hatch for ablations; the combined objective has no weight for
    # the self-alignment term, so it is toggled rather than scaled.
    use_self_alignment: bool = True

    def __post_init__(self):
        if not 0.0 <= self.split <= 1.0:
            raise ValueError(f"split={self.split} outside [0, 1]")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("loss weights must be nonnegative")
        if self.block_rows < 1:
            raise ValueError("block_rows must be >= 1")


@dataclass
class LossBreakdown:
    l_ali: float
    l_nei: float
    l_spa: float
    total: float


def _check_same_shape(z1: ad.Value, z2: ad.Value) -> None:
    if z1.data.shape != z2.data.shape:
        raise ShapeMismatch(f"views differ: {z1.data.shape} vs {z2.data.shape}")


def loss_self_alignment(z1: ad.Value, z2: ad.Value) -> ad.Value:
    """Negative mean cosine between the two views of each node."""
    _check_same_shape(z1, z2)
    n = z1.data.shape[0]
    value = -np.mean(np.sum(z1.data * z2.data, axis=1))

    def backward(g):
        c = -g / n
        ad._accumulate(z1, c * z2.data)
        ad._accumulate(z2, c * z1.data)

    return z1.tape.record(value, (z1, z2), backward)


def loss_neighbor_alignment(
    z1: ad.Value, z2: ad.Value, edges: tuple[np.ndarray, np.ndarray]
) -> ad.Value:
    """Negative mean cosine over all directed adjacent pairs (i, j)."""
    _check_same_shape(z1, z2)
    src, dst = edges
    m = src.shape[0]
    if m == 0:
        raise EmptyEdgeSet("neighbor alignment needs at least one edge")
    value = -np.mean(np.sum(z1.data[src] * z2.data[dst], axis=1))

    def backward(g):
        c = -g / m
        d1 = np.zeros_like(z1.data)
        d2 = np.zeros_like(z2.data)
        np.add.at(d1, src, c * z2.data[dst])
        np.add.at(d2, dst, c * z1.data[src])
        ad._accumulate(z1, d1)
        ad._accumulate(z2, d2)

    return z1.tape.record(value, (z1, z2), backward)


def disconnected_pair_count(adjacency: CSRMatrix) -> int:
    n = adjacency.shape[0]
    return n * n - n - adjacency.nnz


def loss_sparsity(
    z1: ad.Value, z2: ad.Value, adjacency: CSRMatrix, cfg: LossConfig
) -> ad.Value:
    """Mean sigmoid((S_ij - split)/tau) over disconnected pairs i != j.

    Evaluated in row blocks; the backward partials for z1 and z2 are
    accumulated during the same sweep, so backward itself only scales
    them by the upstream gradient.
    """
    _check_same_shape(z1, z2)
    x1, x2 = z1.data, z2.data
    n = x1.shape[0]
    count = disconnected_pair_count(adjacency)
    if count == 0:
        raise NoDisconnectedPairs("graph is complete; sparsity term undefined")
    want_grad = z1.requires_grad or z2.requires_grad
    partial1 = np.zeros_like(x1) if want_grad else None
    partial2 = np.zeros_like(x2) if want_grad else None

    total = 0.0
    block = min(cfg.block_rows, n)
    w_buf = np.empty((block, n), dtype=x1.dtype)
    for r0 in range(0, n, block):
        r1 = min(r0 + block, n)
        s_blk = x1[r0:r1] @ x2.T
        w_blk = w_buf[: r1 - r0]
        total += _kernels.sparsity_block(
            s_blk, r0, adjacency.indptr, adjacency.indices, cfg.split, cfg.tau, w_blk
        )
        if want_grad:
            partial1[r0:r1] = w_blk @ x2
            partial2 += w_blk.T @ x1[r0:r1]
    value = total / count

    def backward(g):
        c = g / count
        ad._accumulate(z1, c * partial1)
        ad._accumulate(z2, c * partial2)

    return z1.tape.record(value, (z1, z2), backward)


def graph_edge_pairs(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Directed (src, dst) arrays of the original adjacency."""
    return g.adjacency.coo()


def total_loss(
    z1: ad.Value,
    z2: ad.Value,
    g: Graph,
    cfg: LossConfig,
    edges: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[ad.Value, LossBreakdown]:
    """Combine the three terms; disabled terms are skipped, not just zeroed.

    Pair sets come from the original adjacency, not the augmented views.
    """
    if edges is None:
        edges = graph_edge_pairs(g)
    terms = []
    l_ali = l_nei = l_spa = 0.0
    if cfg.use_self_alignment:
        ali = loss_self_alignment(z1, z2)
        l_ali = float(ali.data)
        terms.append(ali)
    if cfg.lam > 0:
        nei = loss_neighbor_alignment(z1, z2, edges)
        l_nei = float(nei.data)
        terms.append(ad.scale(nei, cfg.lam))
    if cfg.gamma > 0:
        spa = loss_sparsity(z1, z2, g.adjacency, cfg)
        l_spa = float(spa.data)
        terms.append(ad.scale(spa, cfg.gamma))
    if not terms:
        raise ValueError("all loss terms disabled")
    node = terms[0]
    for t in terms[1:]:
        node = ad.add(node, t)
    return node, LossBreakdown(l_ali, l_nei, l_spa, float(node.data))


def sparsity_gradient_curve(
    split: float, tau: float, grid: np.ndarray
) -> np.ndarray:
    """Per-pair gradient magnitude of the sparsity penalty vs similarity.

    Returns rows (similarity, magnitude) where the magnitude is
    (1/tau) / (exp(u) + 2 + exp(-u)) with u = (similarity - split)/tau,
    i.e. the derivative of sigmoid(u) with respect to the similarity.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    grid = np.asarray(grid, dtype=np.float64)
    u = (grid - split) / tau
    sig = expit(u)
    magnitude = sig * (1.0 - sig) / tau
    return np.stack([grid, magnitude], axis=1)
