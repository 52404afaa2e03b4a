"""Seeded stochastic graph augmentation: edge dropping and feature masking.

All randomness flows through counter-style streams derived from
(seed, epoch, view, purpose), so any view can be regenerated
independently of call order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .graph import Graph, symmetric_csr
from .sparse import CSRMatrix, mask_csr_columns

_PURPOSE_EDGES = 0
_PURPOSE_FEATURES = 1


@dataclass(frozen=True)
class AugmentConfig:
    p_d1: float = 0.0
    p_d2: float = 0.0
    p_m1: float = 0.0
    p_m2: float = 0.0

    def __post_init__(self):
        for name in ("p_d1", "p_d2", "p_m1", "p_m2"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")


@dataclass
class AugmentedView:
    """A corrupted copy of a graph: subgraph adjacency plus masked features."""

    adjacency: CSRMatrix
    features: Union[np.ndarray, CSRMatrix]
    kept_dims: np.ndarray


def stream(seed: int, epoch: int, view: int, purpose: int) -> np.random.Generator:
    """Independent generator keyed by (seed, epoch, view, purpose)."""
    ss = np.random.SeedSequence(seed, spawn_key=(epoch, view, purpose))
    return np.random.Generator(np.random.Philox(ss))


def sample_feature_mask(p: int, p_m: float, rng: np.random.Generator) -> np.ndarray:
    """One Bernoulli(1 - p_m) draw per feature dimension."""
    return rng.random(p) < (1.0 - p_m)


def mask_features(
    x: np.ndarray, p_m: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Zero whole feature columns; the same mask applies to every node."""
    kept = sample_feature_mask(x.shape[1], p_m, rng)
    return x * kept[None, :].astype(x.dtype), kept


def drop_edges(
    adjacency: CSRMatrix, p_d: float, rng: np.random.Generator
) -> CSRMatrix:
    """Keep each undirected edge with probability 1 - p_d, atomically."""
    n = adjacency.shape[0]
    rows, cols = adjacency.coo()
    upper = rows < cols
    lo, hi = rows[upper], cols[upper]
    keep = rng.random(lo.shape[0]) < (1.0 - p_d)
    return symmetric_csr(n, lo[keep], hi[keep])


def sample_views(
    g: Graph, cfg: AugmentConfig, epoch: int, seed: int, sparse_features: bool | None = None
) -> tuple[AugmentedView, AugmentedView]:
    """Draw the two per-epoch views from disjoint RNG streams.

    ``sparse_features`` selects the feature layout of the views (CSR when
    True); by default dense inputs stay dense unless their density is
    below 25%, where CSR is both smaller and faster downstream. The
    realized values are identical either way.
    """
    if sparse_features is None:
        sparse_features = g.feature_density() < 0.25
    views = []
    for view, (p_d, p_m) in enumerate([(cfg.p_d1, cfg.p_m1), (cfg.p_d2, cfg.p_m2)]):
        adj = drop_edges(g.adjacency, p_d, stream(seed, epoch, view, _PURPOSE_EDGES))
        kept = sample_feature_mask(
            g.num_features, p_m, stream(seed, epoch, view, _PURPOSE_FEATURES)
        )
        if sparse_features:
            feats: Union[np.ndarray, CSRMatrix] = mask_csr_columns(g.features_csr(), kept)
        else:
            feats = g.features * kept[None, :].astype(g.features.dtype)
        views.append(AugmentedView(adj, feats, kept))
    return views[0], views[1]
