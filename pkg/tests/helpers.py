"""Shared test utilities: in-memory tiny samples and finite-difference
gradient checking of the full network."""

from datetime import date, timedelta

import numpy as np

from riskcast.neural import backward
from riskcast.neural.model import FusionNetwork, ModelConfig
from riskcast.train.manifest import Sample

TINY = ModelConfig().tiny()


def make_tiny_sample(rng, config=TINY, day=date(2021, 3, 1), constant_parts=None):
    """Random in-memory sample matching a (usually tiny) model config."""
    con = constant_parts or {}

    def padded(seq, dim, key):
        if key in con:
            return con[key]
        valid = int(rng.integers(max(seq // 2, 1), seq + 1))
        m = np.zeros((seq, dim))
        m[:valid] = rng.normal(size=(valid, dim))
        return m, valid

    audio, audio_valid = padded(config.audio_seq, config.audio_dim, "audio")
    text, text_valid = padded(config.text_seq, config.text_dim, "text")
    return Sample(
        ticker="TST",
        date=day,
        audio_emb=audio,
        audio_valid=audio_valid,
        text_emb=text,
        text_valid=text_valid,
        summary_emb=rng.normal(size=config.analysis_dim),
        answers_emb=con.get("answers", rng.normal(size=config.analysis_dim)),
        news_emb=rng.normal(size=config.news_dim),
        vix=20.0 + np.cumsum(rng.normal(0, 0.5, size=30)),
        vol_labels=rng.normal(-4.0, 0.5, size=4),
        next_return=float(rng.normal(0, 0.02)),
    )


def gradient_check(model: FusionNetwork, samples, mu, q, flags=None,
                   rng=None, max_per_tensor=8, step=1e-5):
    """Max relative error between analytic and central-difference gradients,
    probing up to ``max_per_tensor`` entries of every parameter tensor."""
    rng = rng or np.random.default_rng(0)
    model.zero_grad()
    loss = model.batch_loss(samples, mu, q, flags)
    backward(loss)
    analytic = {
        name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
        for name, p in model.named_params()
    }

    def loss_value():
        return float(model.batch_loss(samples, mu, q, flags).data)

    worst = 0.0
    worst_name = None
    for name, p in model.named_params():
        flat = p.data.reshape(-1)
        gflat = analytic[name].reshape(-1)
        k = min(max_per_tensor, flat.size)
        idxs = rng.choice(flat.size, size=k, replace=False)
        for i in idxs:
            orig = flat[i]
            flat[i] = orig + step
            fp = loss_value()
            flat[i] = orig - step
            fm = loss_value()
            flat[i] = orig
            fd = (fp - fm) / (2 * step)
            rel = abs(fd - gflat[i]) / max(abs(fd), abs(gflat[i]), 1e-5)
            if rel > worst:
                worst = rel
                worst_name = name
    return worst, worst_name


def away_from_pinball_kink(model, sample, q, min_gap=1e-4):
    """True when the var head's prediction is safely away from the label."""
    _, var = model.forward(sample)
    return abs(float(var.data) - sample.next_return) > min_gap
