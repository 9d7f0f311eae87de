"""The assembled multimodal fusion network.

Audio and transcript embedding matrices each pass through their own
multi-head self-attention block and are average-pooled over their valid
rows; the index series passes through the BiLSTM; the analysis and news
vectors enter directly. Everything is additively fused and fed to the two
prediction heads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import NumericalFailureError
from . import tensor as T
from .checkpoint import load_checkpoint, save_checkpoint
from .fusion import FusionLayer, PredictionHeads, fuse
from .layers import MhsaLayer, average_pool, mhsa_forward
from .losses import multitask_loss
from .recurrent import SERIES_LEN, SequenceEncoderState, bilstm_forward
from .tensor import Tensor


@dataclass(frozen=True)
class ModelConfig:
    audio_dim: int = 512
    text_dim: int = 768
    analysis_dim: int = 1024
    news_dim: int = 1024
    audio_seq: int = 520
    text_seq: int = 520
    n_heads: int = 8
    fusion_dim: int = 256
    lstm_hidden: int = 64
    mlp_ratio: int = 4
    mask_padding: bool = True

    def tiny(self) -> "ModelConfig":
        """Small variant used by gradient checks and fast tests."""
        return replace(
            self, audio_dim=8, text_dim=8, analysis_dim=8, news_dim=8,
            audio_seq=4, text_seq=4, n_heads=2, fusion_dim=8, lstm_hidden=4,
        )


@dataclass
class ModalityFlags:
    use_audio: bool = True
    use_text: bool = True
    use_analysis: bool = True
    use_vix: bool = True
    use_news: bool = True


class FusionNetwork:
    def __init__(self, config: ModelConfig, seed: int = 0):
        self.config = config
        rng = np.random.default_rng([seed, 0xF05])
        self.audio_mhsa = MhsaLayer(config.audio_dim, config.n_heads, rng,
                                    mlp_ratio=config.mlp_ratio)
        self.text_mhsa = MhsaLayer(config.text_dim, config.n_heads, rng,
                                   mlp_ratio=config.mlp_ratio)
        self.series_enc = SequenceEncoderState(rng, hidden=config.lstm_hidden)
        self.fusion = FusionLayer(
            dims={
                "audio": config.audio_dim,
                "text": config.text_dim,
                "analysis": config.analysis_dim,
                "series": 2 * config.lstm_hidden,
                "news": config.news_dim,
            },
            fusion_dim=config.fusion_dim,
            rng=rng,
        )
        self.heads = PredictionHeads(config.fusion_dim, rng)

    # ------------------------------------------------------------------
    # parameters

    def named_params(self):
        yield from self.audio_mhsa.named_params("audio")
        yield from self.text_mhsa.named_params("text")
        yield from self.series_enc.named_params("series")
        yield from self.fusion.named_params("fusion")
        yield from self.heads.named_params("heads")

    def params(self) -> dict:
        return dict(self.named_params())

    def zero_grad(self):
        for _, p in self.named_params():
            p.grad = None

    def grads(self) -> dict:
        out = {}
        for name, p in self.named_params():
            out[name] = p.grad if p.grad is not None else np.zeros_like(p.data)
        return out

    # ------------------------------------------------------------------
    # forward

    def forward(self, sample, flags: ModalityFlags | None = None):
        """(vol_pred Tensor(4,), var_pred scalar Tensor) for one sample.

        ``sample`` needs: audio_emb, audio_valid, text_emb, text_valid,
        answers_emb, vix, news_emb (arrays; news may be None).
        """
        flags = flags or ModalityFlags()
        cfg = self.config
        t_audio = t_text = t_analysis = t_series = t_news = None
        if flags.use_audio:
            x = Tensor(np.asarray(sample.audio_emb, dtype=np.float64))
            self._expect(x, (cfg.audio_seq, cfg.audio_dim), "audio_emb")
            enc = mhsa_forward(self.audio_mhsa, x, sample.audio_valid,
                               mask_padding=cfg.mask_padding)
            t_audio = average_pool(enc, sample.audio_valid if cfg.mask_padding
                                   else cfg.audio_seq)
        if flags.use_text:
            x = Tensor(np.asarray(sample.text_emb, dtype=np.float64))
            self._expect(x, (cfg.text_seq, cfg.text_dim), "text_emb")
            enc = mhsa_forward(self.text_mhsa, x, sample.text_valid,
                               mask_padding=cfg.mask_padding)
            t_text = average_pool(enc, sample.text_valid if cfg.mask_padding
                                  else cfg.text_seq)
        if flags.use_analysis:
            t_analysis = Tensor(np.asarray(sample.answers_emb, dtype=np.float64))
        if flags.use_vix:
            vix = Tensor(np.asarray(sample.vix, dtype=np.float64).reshape(SERIES_LEN, 1))
            t_series = bilstm_forward(self.series_enc, vix)
        if flags.use_news and sample.news_emb is not None:
            t_news = Tensor(np.asarray(sample.news_emb, dtype=np.float64))
        fused = fuse(self.fusion, t_audio, t_text, t_analysis, t_series, t_news)
        vol, var = self.heads.forward(fused)
        if not (np.all(np.isfinite(vol.data)) and np.isfinite(float(var.data))):
            raise NumericalFailureError("non-finite network output")
        return vol, var

    def batch_loss(self, samples, mu: float, q: float,
                   flags: ModalityFlags | None = None) -> Tensor:
        """Mean multi-task loss over a batch, accumulated in sample order."""
        total = None
        for sample in samples:
            vol, var = self.forward(sample, flags)
            loss = multitask_loss(vol, np.asarray(sample.vol_labels, dtype=np.float64),
                                  var, float(sample.next_return), mu, q)
            total = loss if total is None else T.add(total, loss)
        return T.scale(total, 1.0 / len(samples))

    # ------------------------------------------------------------------
    # persistence

    def save(self, path):
        save_checkpoint(path, self.params())

    def load(self, path):
        loaded, _ = load_checkpoint(path)
        own = self.params()
        if set(loaded) != set(own):
            missing = set(own) ^ set(loaded)
            raise ValueError(f"checkpoint/architecture mismatch, differing keys: {sorted(missing)}")
        for name, arr in loaded.items():
            if arr.shape != own[name].data.shape:
                raise ValueError(
                    f"checkpoint shape {arr.shape} != model shape "
                    f"{own[name].data.shape} for {name}"
                )
            own[name].data = arr.copy()

    @staticmethod
    def _expect(x: Tensor, shape, name: str):
        if x.shape != shape:
            raise ValueError(f"{name} has shape {x.shape}, expected {shape}")
