"""Reverse-mode automatic differentiation over dense matrices.

A Tape records operations in creation order (which is already a
topological order); ``Tape.backward`` walks it in reverse, accumulating
gradients into every node that requires them. Values wrap NumPy arrays;
scalars are 0-d arrays. Sparse matrices appear only as constant left
factors in :func:`spmm` and are never differentiated.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from . import _kernels
from .errors import IndexOutOfRange, NonScalarLoss, ShapeMismatch
from .sparse import CSRMatrix

# Rows with l2 norm below this normalize to the zero row and get zero gradient.
NORMALIZE_EPS = 1e-12


class Value:
    """One tape node: an output array plus the rule to push gradients back."""

    __slots__ = ("tape", "data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, tape, data, requires_grad, parents=(), backward=None):
        self.tape = tape
        self.data = data
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.data.shape


class Tape:
    """Ordered record of operations for one forward/backward pass."""

    def __init__(self):
        self._nodes: list[Value] = []

    def leaf(self, data, requires_grad: bool = False) -> Value:
        v = Value(self, np.asarray(data), requires_grad)
        self._nodes.append(v)
        return v

    def record(
        self,
        data,
        parents: Sequence[Value],
        backward: Callable[[np.ndarray], None],
    ) -> Value:
        """Append an op node; ``backward(g)`` must accumulate into parents."""
        requires = any(p.requires_grad for p in parents)
        v = Value(self, np.asarray(data), requires, tuple(parents), backward)
        self._nodes.append(v)
        return v

    def backward(self, loss: Value) -> None:
        """Populate ``grad`` on every node the scalar ``loss`` depends on."""
        if loss.data.shape != ():
            raise NonScalarLoss(f"loss has shape {loss.data.shape}")
        for node in self._nodes:
            node.grad = None
        loss.grad = np.asarray(1.0, dtype=loss.data.dtype)
        for node in reversed(self._nodes):
            if node.grad is None or node._backward is None:
                continue
            node._backward(node.grad)


def _accumulate(node: Value, g: np.ndarray) -> None:
    if not node.requires_grad:
        return
    node.grad = g if node.grad is None else node.grad + g


def matmul(a: Value, b: Value, transpose_b: bool = False) -> Value:
    inner_b = b.data.shape[1] if transpose_b else b.data.shape[0]
    if a.data.shape[1] != inner_b:
        raise ShapeMismatch(f"matmul {a.data.shape} x {b.data.shape}")
    out = a.data @ (b.data.T if transpose_b else b.data)

    def backward(g):
        if transpose_b:
            _accumulate(a, g @ b.data)
            _accumulate(b, g.T @ a.data)
        else:
            _accumulate(a, g @ b.data.T)
            _accumulate(b, a.data.T @ g)

    return a.tape.record(out, (a, b), backward)


def spmm(a: CSRMatrix, b: Value) -> Value:
    """Constant sparse times dense; gradient flows only into ``b``."""
    if a.shape[1] != b.data.shape[0]:
        raise ShapeMismatch(f"spmm {a.shape} x {b.data.shape}")
    data = a.values(b.data.dtype)
    out = _kernels.spmm(a.indptr, a.indices, data, np.ascontiguousarray(b.data))

    def backward(g):
        at = a.transpose()
        _accumulate(
            b, _kernels.spmm(at.indptr, at.indices, at.values(g.dtype), np.ascontiguousarray(g))
        )

    return b.tape.record(out, (b,), backward)


def relu(a: Value) -> Value:
    out = np.maximum(a.data, 0)

    def backward(g):
        _accumulate(a, g * (a.data > 0))

    return a.tape.record(out, (a,), backward)


def sigmoid(a: Value) -> Value:
    out = expit(a.data)

    def backward(g):
        _accumulate(a, g * (out * (1 - out)))

    return a.tape.record(out, (a,), backward)


def row_l2_normalize(a: Value, eps: float = NORMALIZE_EPS) -> Value:
    norms = np.sqrt(np.sum(a.data * a.data, axis=1, keepdims=True))
    alive = norms >= eps
    safe = np.where(alive, norms, 1)
    out = np.where(alive, a.data / safe, 0)

    def backward(g):
        dot = np.sum(g * out, axis=1, keepdims=True)
        _accumulate(a, np.where(alive, (g - dot * out) / safe, 0))

    return a.tape.record(out, (a,), backward)


def add(a: Value, b: Value) -> Value:
    if a.data.shape != b.data.shape:
        raise ShapeMismatch(f"add {a.data.shape} vs {b.data.shape}")

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, g)

    return a.tape.record(a.data + b.data, (a, b), backward)


def scale(a: Value, c: float) -> Value:
    def backward(g):
        _accumulate(a, g * c)

    return a.tape.record(a.data * c, (a,), backward)


def shift(a: Value, c: float) -> Value:
    """Elementwise addition of a constant."""

    def backward(g):
        _accumulate(a, g)

    return a.tape.record(a.data + c, (a,), backward)


def gather_pairs(s: Value, rows, cols) -> Value:
    """Extract s[i, j] per (i, j) pair; gradients return to those entries."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    n_r, n_c = s.data.shape
    if rows.size and (
        rows.min() < 0 or rows.max() >= n_r or cols.min() < 0 or cols.max() >= n_c
    ):
        raise IndexOutOfRange("gather_pairs index outside matrix")
    out = s.data[rows, cols]

    def backward(g):
        ds = np.zeros_like(s.data)
        np.add.at(ds, (rows, cols), g)
        _accumulate(s, ds)

    return s.tape.record(out, (s,), backward)


def mean(a: Value) -> Value:
    size = a.data.size

    def backward(g):
        _accumulate(a, np.full_like(a.data, g / size))

    return a.tape.record(a.data.mean(), (a,), backward)


def mean_diag(s: Value) -> Value:
    n_r, n_c = s.data.shape
    if n_r != n_c:
        raise ShapeMismatch("mean_diag requires a square matrix")

    def backward(g):
        ds = np.zeros_like(s.data)
        np.fill_diagonal(ds, g / n_r)
        _accumulate(s, ds)

    return s.tape.record(np.trace(s.data) / n_r, (s,), backward)


def grad_check(
    f: Callable[..., Value], leaves: Sequence[np.ndarray], h: float = 1e-5
) -> float:
    """Max relative error of analytic vs central-difference gradients.

    ``f`` takes one Value per leaf and returns a scalar Value; it must be
    deterministic. Error per coordinate is
    |analytic - numeric| / max(1, |numeric|).
    """
    leaves = [np.asarray(x, dtype=np.float64) for x in leaves]

    def evaluate(arrays) -> float:
        tape = Tape()
        return float(f(*[tape.leaf(a) for a in arrays]).data)

    tape = Tape()
    vals = [tape.leaf(a, requires_grad=True) for a in leaves]
    tape.backward(f(*vals))
    analytic = [
        v.grad if v.grad is not None else np.zeros_like(v.data) for v in vals
    ]

    worst = 0.0
    for li, arr in enumerate(leaves):
        for idx in range(arr.size):
            plus = [a.copy() for a in leaves]
            minus = [a.copy() for a in leaves]
            plus[li].flat[idx] += h
            minus[li].flat[idx] -= h
            numeric = (evaluate(plus) - evaluate(minus)) / (2 * h)
            err = abs(float(analytic[li].flat[idx]) - numeric) / max(1.0, abs(numeric))
            worst = max(worst, err)
    return worst
