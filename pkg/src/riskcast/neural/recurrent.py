"""Bidirectional LSTM encoder for fixed-length value series."""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Tensor

SERIES_LEN = 30  # trailing window of index values preceding each call


class _LstmCell:
    def __init__(self, in_dim: int, hidden: int, rng, init_scale: float):
        self.hidden = hidden
        self.wx = Tensor(rng.normal(0.0, init_scale, size=(in_dim, 4 * hidden)))
        self.wh = Tensor(rng.normal(0.0, init_scale, size=(hidden, 4 * hidden)))
        self.b = Tensor(np.zeros(4 * hidden))

    def step(self, x_row: Tensor, h: Tensor, c: Tensor):
        z = T.add(T.add(T.matmul(x_row, self.wx), T.matmul(h, self.wh)), self.b)
        n = self.hidden
        i = T.sigmoid(T.slice1d(z, 0, n))
        f = T.sigmoid(T.slice1d(z, n, 2 * n))
        g = T.tanh(T.slice1d(z, 2 * n, 3 * n))
        o = T.sigmoid(T.slice1d(z, 3 * n, 4 * n))
        c_new = T.add(T.mul(f, c), T.mul(i, g))
        h_new = T.mul(o, T.tanh(c_new))
        return h_new, c_new


class SequenceEncoderState:
    """Forward and backward LSTM cells; output dim is 2 * hidden."""

    def __init__(self, rng: np.random.Generator, hidden: int = 64, in_dim: int = 1,
                 init_scale: float = 0.05, shared: bool = False):
        self.hidden = hidden
        self.in_dim = in_dim
        self.fwd = _LstmCell(in_dim, hidden, rng, init_scale)
        self.bwd = self.fwd if shared else _LstmCell(in_dim, hidden, rng, init_scale)
        self.shared = shared

    @property
    def out_dim(self) -> int:
        return 2 * self.hidden

    def named_params(self, prefix: str):
        yield f"{prefix}.fwd.wx", self.fwd.wx
        yield f"{prefix}.fwd.wh", self.fwd.wh
        yield f"{prefix}.fwd.b", self.fwd.b
        if not self.shared:
            yield f"{prefix}.bwd.wx", self.bwd.wx
            yield f"{prefix}.bwd.wh", self.bwd.wh
            yield f"{prefix}.bwd.b", self.bwd.b


def bilstm_forward(state: SequenceEncoderState, series: Tensor) -> Tensor:
    """Concatenate the final forward and final backward hidden states.

    ``series`` must be (SERIES_LEN, in_dim).
    """
    if series.shape != (SERIES_LEN, state.in_dim):
        raise ValueError(
            f"expected series of shape {(SERIES_LEN, state.in_dim)}, got {series.shape}"
        )
    n = state.hidden
    h = Tensor(np.zeros(n))
    c = Tensor(np.zeros(n))
    for t in range(SERIES_LEN):
        h, c = state.fwd.step(T.row(series, t), h, c)
    h_fwd = h
    h = Tensor(np.zeros(n))
    c = Tensor(np.zeros(n))
    for t in reversed(range(SERIES_LEN)):
        h, c = state.bwd.step(T.row(series, t), h, c)
    return T.concat([h_fwd, h])
