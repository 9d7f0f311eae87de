"""Additive multimodal fusion and the two prediction heads.

The joint representation is

    E = w0 + w1*P_a(T_a) + w2*P_t(T_t) + w3*P_f(T_f) + P_v(T_v) + P_n(T_n)

where each P is a learned projection onto the shared fusion dimension. The
audio/text/analysis terms carry learnable scalar weights; the series and
news terms enter with unit weight. The bias vector w0 also absorbs the
additive noise term of the formulation so inference stays deterministic.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Tensor


class FusionLayer:
    def __init__(self, dims: dict, fusion_dim: int, rng: np.random.Generator,
                 init_scale: float = 0.05):
        """``dims`` maps modality name (audio/text/analysis/series/news) to
        its input feature dimension."""
        self.dims = dict(dims)
        self.fusion_dim = fusion_dim

        def proj(d):
            return Tensor(rng.normal(0.0, init_scale, size=(d, fusion_dim)))

        self.proj = {name: proj(d) for name, d in self.dims.items()}
        self.w0 = Tensor(np.zeros(fusion_dim))
        self.w_audio = Tensor(np.asarray(1.0))
        self.w_text = Tensor(np.asarray(1.0))
        self.w_analysis = Tensor(np.asarray(1.0))

    def named_params(self, prefix: str):
        for name in sorted(self.proj):
            yield f"{prefix}.proj.{name}", self.proj[name]
        yield f"{prefix}.w0", self.w0
        yield f"{prefix}.w_audio", self.w_audio
        yield f"{prefix}.w_text", self.w_text
        yield f"{prefix}.w_analysis", self.w_analysis


def fuse(fusion: FusionLayer, t_audio, t_text, t_analysis, t_series, t_news) -> Tensor:
    """Fused representation; pass None for an absent modality (treated as
    zeros, matching the ablation mechanics)."""
    weighted = (
        ("audio", t_audio, fusion.w_audio),
        ("text", t_text, fusion.w_text),
        ("analysis", t_analysis, fusion.w_analysis),
        ("series", t_series, None),
        ("news", t_news, None),
    )
    out = fusion.w0
    for name, vec, w in weighted:
        if vec is None:
            continue
        if vec.shape != (fusion.dims[name],):
            raise ValueError(
                f"{name} feature has shape {vec.shape}, expected ({fusion.dims[name]},)"
            )
        term = T.matmul(vec, fusion.proj[name])
        if w is not None:
            out = T.add(out, T.mul(term, w))
        else:
            out = T.add(out, term)
    return out


class PredictionHeads:
    """Two single-layer affine heads: volatility (4 horizons) and VaR (1)."""

    def __init__(self, fusion_dim: int, rng: np.random.Generator,
                 init_scale: float = 0.05):
        self.vol_w = Tensor(rng.normal(0.0, init_scale, size=(fusion_dim, 4)))
        self.vol_b = Tensor(np.zeros(4))
        self.var_w = Tensor(rng.normal(0.0, init_scale, size=fusion_dim))
        self.var_b = Tensor(np.asarray(0.0))

    def named_params(self, prefix: str):
        yield f"{prefix}.vol_w", self.vol_w
        yield f"{prefix}.vol_b", self.vol_b
        yield f"{prefix}.var_w", self.var_w
        yield f"{prefix}.var_b", self.var_b

    def forward(self, fused: Tensor):
        vol = T.add(T.matmul(fused, self.vol_w), self.vol_b)
        var = T.add(T.matmul(fused, self.var_w), self.var_b)
        return vol, var
