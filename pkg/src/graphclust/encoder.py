"""Stacked graph-convolution encoder producing unit-norm node embeddings."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import autodiff as ad
from .errors import ShapeMismatch
from .graph import Graph, NormalizedAdjacency, normalize_adjacency
from .sparse import CSRMatrix

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class EncoderConfig:
    """Hidden widths of the convolution stack, e.g. (256, 64)."""

    layer_dims: tuple[int, ...] = (256, 64)

    def __post_init__(self):
        if not self.layer_dims:
            raise ValueError("encoder needs at least one layer")
        if any(d <= 0 for d in self.layer_dims):
            raise ValueError("layer widths must be positive")


@dataclass
class EncoderParams:
    """Per-layer weight matrices, input dim chaining through layer_dims."""

    weights: list[np.ndarray]

    def copy(self) -> "EncoderParams":
        return EncoderParams([w.copy() for w in self.weights])

    def astype(self, dtype) -> "EncoderParams":
        return EncoderParams([w.astype(dtype) for w in self.weights])


def init_params(
    cfg: EncoderConfig, num_features: int, rng: np.random.Generator, dtype=np.float64
) -> EncoderParams:
    """Glorot-uniform initialization, bound sqrt(6 / (fan_in + fan_out))."""
    weights = []
    fan_in = num_features
    for fan_out in cfg.layer_dims:
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        weights.append(w.astype(dtype))
        fan_in = fan_out
    return EncoderParams(weights)


def forward(
    tape: ad.Tape,
    weight_leaves: list[ad.Value],
    adj_norm: NormalizedAdjacency,
    x: Union[np.ndarray, CSRMatrix],
) -> ad.Value:
    """Record the full encoder on the tape and return unit-norm rows.

    Every layer computes normalized-adjacency @ (h @ W); ReLU joins
    layers, the last layer stays linear, and the output rows are l2
    normalized. ``x`` may be dense or CSR; either way it is a constant.
    """
    n = adj_norm.shape[0]
    x_rows = x.shape[0]
    if x_rows != n:
        raise ShapeMismatch(f"features have {x_rows} rows, adjacency {n}")
    h: Union[ad.Value, None] = None
    for i, w in enumerate(weight_leaves):
        if i == 0:
            if isinstance(x, CSRMatrix):
                hw = ad.spmm(x, w)
            else:
                hw = ad.matmul(tape.leaf(x), w)
        else:
            hw = ad.matmul(h, w)
        h = ad.spmm(adj_norm.matrix, hw)
        if i + 1 < len(weight_leaves):
            h = ad.relu(h)
    return ad.row_l2_normalize(h)


def embed(params: EncoderParams, g: Graph, dtype=np.float64) -> np.ndarray:
    """Encode the original (unaugmented) graph with fixed parameters."""
    tape = ad.Tape()
    leaves = [tape.leaf(w.astype(dtype, copy=False)) for w in params.weights]
    adj_norm = normalize_adjacency(g, dtype=dtype)
    x: Union[np.ndarray, CSRMatrix]
    if g.feature_density() < 0.25:
        x = g.features_csr().astype(dtype)
    else:
        x = g.features.astype(dtype, copy=False)
    return forward(tape, leaves, adj_norm, x).data


def save_checkpoint(path, params: EncoderParams, extra: dict | None = None) -> None:
    """Write a JSON header plus row-major little-endian float32 weights."""
    header = {
        "format_version": CHECKPOINT_VERSION,
        "layer_shapes": [list(w.shape) for w in params.weights],
        "dtype": "f32",
    }
    if extra:
        header.update(extra)
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for w in params.weights:
            f.write(np.ascontiguousarray(w, dtype="<f4").tobytes())


def load_checkpoint(path) -> tuple[EncoderParams, dict]:
    with open(path, "rb") as f:
        (header_len,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(header_len).decode("utf-8"))
        weights = []
        for shape in header["layer_shapes"]:
            count = int(np.prod(shape))
            buf = f.read(4 * count)
            if len(buf) != 4 * count:
                raise ValueError("checkpoint truncated")
            weights.append(
                np.frombuffer(buf, dtype="<f4").reshape(shape).astype(np.float32)
            )
    return EncoderParams(weights), header
