"""Minimal reverse-mode autodiff over float64 numpy buffers.

The graph is built eagerly by the ops below; ``backward(loss)`` topologically
sorts it and accumulates exact gradients into every reachable node. Only the
operations needed by the fixed fusion architecture are provided.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import NumericalFailureError


class Tensor:
    """A float64 array node in the computation graph."""

    __slots__ = ("data", "grad", "_parents", "_backward")

    def __init__(self, data, parents=(), backward_fn=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward_fn

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"

    # operator sugar used throughout the layer code
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return scale(self, -1.0)


def constant(data) -> Tensor:
    """Leaf with no parents; gradients accumulate but are never consumed."""
    return Tensor(data)


def parameter(data) -> Tensor:
    return Tensor(data)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _accum(t: Tensor, g: np.ndarray) -> None:
    g = _unbroadcast(np.asarray(g, dtype=np.float64), t.data.shape)
    t.grad = g if t.grad is None else t.grad + g


def _unbroadcast(g: np.ndarray, shape) -> np.ndarray:
    """Reduce a broadcast gradient back to the operand's shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data + b.data, (a, b))

    def back():
        _accum(a, out.grad)
        _accum(b, out.grad)

    out._backward = back
    return out


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data - b.data, (a, b))

    def back():
        _accum(a, out.grad)
        _accum(b, -out.grad)

    out._backward = back
    return out


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data * b.data, (a, b))

    def back():
        _accum(a, out.grad * b.data)
        _accum(b, out.grad * a.data)

    out._backward = back
    return out


def div(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data / b.data, (a, b))

    def back():
        _accum(a, out.grad / b.data)
        _accum(b, -out.grad * a.data / (b.data**2))

    out._backward = back
    return out


def scale(a, c: float) -> Tensor:
    """Multiply by a plain float constant (not part of the graph)."""
    a = _as_tensor(a)
    out = Tensor(a.data * c, (a,))

    def back():
        _accum(a, out.grad * c)

    out._backward = back
    return out


def shift(a, c: float) -> Tensor:
    """Add a plain float constant."""
    a = _as_tensor(a)
    out = Tensor(a.data + c, (a,))

    def back():
        _accum(a, out.grad)

    out._backward = back
    return out


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = Tensor(a.data @ b.data, (a, b))
    a_nd, b_nd = a.data.ndim, b.data.ndim

    def back():
        g = out.grad
        if a_nd == 2 and b_nd == 2:
            _accum(a, g @ b.data.T)
            _accum(b, a.data.T @ g)
        elif a_nd == 2 and b_nd == 1:          # (m,k)@(k,) -> (m,)
            _accum(a, np.outer(g, b.data))
            _accum(b, a.data.T @ g)
        elif a_nd == 1 and b_nd == 2:          # (k,)@(k,n) -> (n,)
            _accum(a, b.data @ g)
            _accum(b, np.outer(a.data, g))
        elif a_nd == 1 and b_nd == 1:          # dot -> scalar
            _accum(a, g * b.data)
            _accum(b, g * a.data)
        else:
            raise NotImplementedError("matmul backward for >2-d operands")

    out._backward = back
    return out


def transpose(a) -> Tensor:
    a = _as_tensor(a)
    out = Tensor(a.data.T, (a,))

    def back():
        _accum(a, out.grad.T)

    out._backward = back
    return out


def relu(a) -> Tensor:
    a = _as_tensor(a)
    out = Tensor(np.maximum(a.data, 0.0), (a,))

    def back():
        _accum(a, out.grad * (a.data > 0.0))

    out._backward = back
    return out


def tanh(a) -> Tensor:
    a = _as_tensor(a)
    t = np.tanh(a.data)
    out = Tensor(t, (a,))

    def back():
        _accum(a, out.grad * (1.0 - t**2))

    out._backward = back
    return out


def sigmoid(a) -> Tensor:
    a = _as_tensor(a)
    s = 1.0 / (1.0 + np.exp(-a.data))
    out = Tensor(s, (a,))

    def back():
        _accum(a, out.grad * s * (1.0 - s))

    out._backward = back
    return out


def exp(a) -> Tensor:
    a = _as_tensor(a)
    e = np.exp(a.data)
    out = Tensor(e, (a,))

    def back():
        _accum(a, out.grad * e)

    out._backward = back
    return out


def sqrt(a) -> Tensor:
    a = _as_tensor(a)
    r = np.sqrt(a.data)
    out = Tensor(r, (a,))

    def back():
        _accum(a, out.grad * 0.5 / r)

    out._backward = back
    return out


def maximum(a, b) -> Tensor:
    """Elementwise max; at ties the subgradient goes to the first operand."""
    a, b = _as_tensor(a), _as_tensor(b)
    take_a = a.data >= b.data
    out = Tensor(np.where(take_a, a.data, b.data), (a, b))

    def back():
        _accum(a, out.grad * take_a)
        _accum(b, out.grad * ~take_a)

    out._backward = back
    return out


def tsum(a) -> Tensor:
    a = _as_tensor(a)
    out = Tensor(a.data.sum(), (a,))

    def back():
        _accum(a, np.full_like(a.data, out.grad))

    out._backward = back
    return out


def mean_last(a) -> Tensor:
    """Mean over the last axis with keepdims (layer-norm helper)."""
    a = _as_tensor(a)
    n = a.data.shape[-1]
    out = Tensor(a.data.mean(axis=-1, keepdims=True), (a,))

    def back():
        _accum(a, np.broadcast_to(out.grad / n, a.data.shape))

    out._backward = back
    return out


def mean_rows(a, n_rows: int) -> Tensor:
    """Mean over the first ``n_rows`` rows of a matrix -> vector."""
    a = _as_tensor(a)
    if not 1 <= n_rows <= a.data.shape[0]:
        raise ValueError(f"cannot pool {n_rows} rows of {a.data.shape[0]}")
    out = Tensor(a.data[:n_rows].mean(axis=0), (a,))

    def back():
        g = np.zeros_like(a.data)
        g[:n_rows] = out.grad / n_rows
        _accum(a, g)

    out._backward = back
    return out


def softmax_rows(a, valid_len: int | None = None) -> Tensor:
    """Row-wise softmax; columns at or beyond ``valid_len`` get zero weight."""
    a = _as_tensor(a)
    scores = a.data
    if valid_len is not None:
        if not 1 <= valid_len <= scores.shape[-1]:
            raise ValueError(f"valid_len {valid_len} outside 1..{scores.shape[-1]}")
        masked = scores[..., :valid_len]
    else:
        masked = scores
    shifted = masked - masked.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    w_valid = e / e.sum(axis=-1, keepdims=True)
    w = np.zeros_like(scores)
    w[..., : w_valid.shape[-1]] = w_valid
    out = Tensor(w, (a,))

    def back():
        g = out.grad
        dot = (g * w).sum(axis=-1, keepdims=True)
        _accum(a, w * (g - dot))

    out._backward = back
    return out


def concat(parts) -> Tensor:
    """Concatenate 1-d tensors."""
    parts = [_as_tensor(p) for p in parts]
    sizes = [p.data.shape[0] for p in parts]
    out = Tensor(np.concatenate([p.data for p in parts]), tuple(parts))

    def back():
        off = 0
        for p, s in zip(parts, sizes):
            _accum(p, out.grad[off : off + s])
            off += s

    out._backward = back
    return out


def hstack(parts) -> Tensor:
    """Concatenate matrices along columns (multi-head concat)."""
    parts = [_as_tensor(p) for p in parts]
    widths = [p.data.shape[1] for p in parts]
    out = Tensor(np.concatenate([p.data for p in parts], axis=1), tuple(parts))

    def back():
        off = 0
        for p, w in zip(parts, widths):
            _accum(p, out.grad[:, off : off + w])
            off += w

    out._backward = back
    return out


def row(a, i: int) -> Tensor:
    a = _as_tensor(a)
    out = Tensor(a.data[i], (a,))

    def back():
        g = np.zeros_like(a.data)
        g[i] = out.grad
        _accum(a, g)

    out._backward = back
    return out


def slice1d(a, start: int, stop: int) -> Tensor:
    a = _as_tensor(a)
    out = Tensor(a.data[start:stop], (a,))

    def back():
        g = np.zeros_like(a.data)
        g[start:stop] = out.grad
        _accum(a, g)

    out._backward = back
    return out


def backward(loss: Tensor, check_finite: bool = True) -> None:
    """Reverse-mode sweep from a scalar loss.

    Raises NumericalFailureError when the loss or any accumulated gradient
    is non-finite.
    """
    if loss.data.ndim != 0:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.data.shape}")
    if not math.isfinite(float(loss.data)):
        raise NumericalFailureError("non-finite loss value")
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones((), dtype=np.float64)
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward()
    if check_finite:
        for node in order:
            if node.grad is not None and not np.all(np.isfinite(node.grad)):
                raise NumericalFailureError("non-finite gradient encountered")
