"""Attention, multi-head self-attention block, layer norm, average pooling."""

from __future__ import annotations

import math

import numpy as np

from . import tensor as T
from .tensor import Tensor


def attention(q: Tensor, k: Tensor, v: Tensor, valid_len: int | None = None) -> Tensor:
    """Scaled dot-product attention softmax(QK^T / sqrt(d_k)) V.

    ``valid_len`` masks out padded keys (their weights are exactly zero).
    """
    if q.shape[-1] != k.shape[-1]:
        raise ValueError(f"Q and K last dims differ: {q.shape} vs {k.shape}")
    if k.shape[0] != v.shape[0]:
        raise ValueError(f"K and V sequence lengths differ: {k.shape} vs {v.shape}")
    d_k = q.shape[-1]
    scores = T.scale(T.matmul(q, T.transpose(k)), 1.0 / math.sqrt(d_k))
    weights = T.softmax_rows(scores, valid_len)
    return T.matmul(weights, v)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-8) -> Tensor:
    """Normalize over the feature (last) axis with learnable gain and bias."""
    mu = T.mean_last(x)
    centered = T.sub(x, mu)
    var = T.mean_last(T.mul(centered, centered))
    xhat = T.div(centered, T.sqrt(T.shift(var, eps)))
    return T.add(T.mul(xhat, gain), bias)


def average_pool(t: Tensor, valid_len: int) -> Tensor:
    """Mean over the first ``valid_len`` rows; padding rows are excluded."""
    return T.mean_rows(t, valid_len)


class MhsaLayer:
    """One multi-head self-attention block: attention, norm, then a two-layer
    ReLU MLP, with residual connections around the attention and MLP stages.

    d_k = d_v = d_model / h; the MLP hidden width is ``mlp_ratio * d_model``.
    """

    def __init__(self, d_model: int, n_heads: int, rng: np.random.Generator,
                 mlp_ratio: int = 4, init_scale: float = 0.05):
        if d_model % n_heads != 0:
            raise ValueError(f"d_model {d_model} not divisible by {n_heads} heads")
        self.d_model = d_model
        self.n_heads = n_heads
        self.d_k = d_model // n_heads
        hidden = mlp_ratio * d_model

        def init(*shape):
            return Tensor(rng.normal(0.0, init_scale, size=shape))

        self.wq = [init(d_model, self.d_k) for _ in range(n_heads)]
        self.wk = [init(d_model, self.d_k) for _ in range(n_heads)]
        self.wv = [init(d_model, self.d_k) for _ in range(n_heads)]
        self.wo = init(n_heads * self.d_k, d_model)
        self.ln_gain = Tensor(np.ones(d_model))
        self.ln_bias = Tensor(np.zeros(d_model))
        self.w1 = init(d_model, hidden)
        self.b1 = Tensor(np.zeros(hidden))
        self.w2 = init(hidden, d_model)
        self.b2 = Tensor(np.zeros(d_model))

    def named_params(self, prefix: str):
        for i in range(self.n_heads):
            yield f"{prefix}.wq.{i}", self.wq[i]
            yield f"{prefix}.wk.{i}", self.wk[i]
            yield f"{prefix}.wv.{i}", self.wv[i]
        yield f"{prefix}.wo", self.wo
        yield f"{prefix}.ln_gain", self.ln_gain
        yield f"{prefix}.ln_bias", self.ln_bias
        yield f"{prefix}.w1", self.w1
        yield f"{prefix}.b1", self.b1
        yield f"{prefix}.w2", self.w2
        yield f"{prefix}.b2", self.b2


def mhsa_forward(layer: MhsaLayer, x: Tensor, valid_len: int | None = None,
                 mask_padding: bool = True, return_stage: bool = False):
    """Apply the block to a (seq, d_model) input.

    With ``mask_padding`` false the zero-padded rows take part in attention
    and no key is masked (the literal zero-padded reading).

    ``return_stage`` additionally returns the post-norm attention stage
    (the value the MLP residual branch is added to).
    """
    if x.shape[1] != layer.d_model:
        raise ValueError(f"input width {x.shape[1]} != d_model {layer.d_model}")
    vlen = valid_len if mask_padding else None
    heads = []
    for i in range(layer.n_heads):
        q = T.matmul(x, layer.wq[i])
        k = T.matmul(x, layer.wk[i])
        v = T.matmul(x, layer.wv[i])
        heads.append(attention(q, k, v, vlen))
    multihead = T.matmul(T.hstack(heads), layer.wo)
    attn_res = T.add(x, multihead)
    stage = layer_norm(attn_res, layer.ln_gain, layer.ln_bias)
    hidden = T.relu(T.add(T.matmul(stage, layer.w1), layer.b1))
    mlp_out = T.add(T.matmul(hidden, layer.w2), layer.b2)
    out = T.add(stage, mlp_out)
    if return_stage:
        return out, stage
    return out
