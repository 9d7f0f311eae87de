"""Minibatch multi-task training and evaluation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import EmptyDatasetError, NumericalFailureError
from ..market_math import exceedance_rate, mse, pinball_loss
from ..neural import AdamState, adam_step, backward
from ..neural.model import FusionNetwork, ModalityFlags, ModelConfig
from .manifest import DatasetManifest, load_sample

BATCH_GRID = (2, 4, 8)
LR_GRID = (1e-3, 1e-5, 1e-6, 1e-7)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 8
    lr: float = 1e-3
    mu: float = 0.5
    q: float = 0.05
    epochs: int = 300
    seed: int = 0
    early_stop_patience: int = 30
    use_audio: bool = True
    use_text: bool = True
    use_analysis: bool = True
    use_vix: bool = True
    use_news: bool = True

    def flags(self) -> ModalityFlags:
        return ModalityFlags(
            use_audio=self.use_audio, use_text=self.use_text,
            use_analysis=self.use_analysis, use_vix=self.use_vix,
            use_news=self.use_news,
        )


@dataclass
class TrainResult:
    params: dict                  # best checkpoint arrays by name
    metrics: list                 # one dict per epoch
    best_epoch: int
    aborted: bool = False
    abort_reason: str = ""


def _predictions(model: FusionNetwork, samples, flags):
    vols, vars_ = [], []
    for s in samples:
        vol, var = model.forward(s, flags)
        vols.append(vol.data.copy())
        vars_.append(float(var.data))
    return np.asarray(vols), np.asarray(vars_)


def evaluate(model: FusionNetwork, samples, q: float = 0.05,
             flags: ModalityFlags | None = None,
             var_metric: str = "exceedance") -> dict:
    """Per-horizon MSE plus VaR calibration for a list of loaded samples.

    ``var_metric`` selects how the VaR column is reported: ``exceedance``
    (fraction of realized next-day returns below the predicted threshold) or
    ``mean_prediction`` (average predicted quantile).
    """
    if not samples:
        raise EmptyDatasetError("cannot evaluate an empty split")
    flags = flags or ModalityFlags()
    vols, vars_ = _predictions(model, samples, flags)
    labels = np.asarray([s.vol_labels for s in samples])
    returns = np.asarray([s.next_return for s in samples])
    out = {}
    for j, m in enumerate((3, 7, 15, 30)):
        out[f"mse_{m}"] = mse(labels[:, j], vols[:, j])
    out["mean_mse"] = float(np.mean([out[f"mse_{m}"] for m in (3, 7, 15, 30)]))
    out["var_pinball"] = float(np.mean(
        [pinball_loss(r, v, q) for r, v in zip(returns, vars_)]
    ))
    if var_metric == "exceedance":
        out["var"] = exceedance_rate(returns, vars_)
    elif var_metric == "mean_prediction":
        out["var"] = float(vars_.mean())
    else:
        raise ValueError(f"unknown var_metric {var_metric!r}")
    return out


def train(manifest: DatasetManifest, config: TrainConfig,
          model_config: ModelConfig | None = None,
          model: FusionNetwork | None = None) -> tuple[FusionNetwork, TrainResult]:
    """Train the fusion network on the manifest's training split.

    Deterministic given config.seed: parameter init, per-epoch shuffling and
    batch order are all derived from it. Early stopping watches validation
    mean MSE (the last tenth of the training span); on a numerical failure
    the last good checkpoint is kept and the result is flagged aborted.
    """
    model_config = model_config or _config_from_dims(manifest)
    flags = config.flags()
    train_recs, val_recs = manifest.validation_slice()
    test_recs = manifest.test_records()
    if not train_recs:
        raise EmptyDatasetError("manifest has no training samples")
    train_samples = [load_sample(r, manifest) for r in train_recs]
    val_samples = [load_sample(r, manifest) for r in val_recs]
    test_samples = [load_sample(r, manifest) for r in test_recs]

    if model is None:
        model = FusionNetwork(model_config, seed=config.seed)
    params = model.params()
    state = AdamState()
    best = {name: p.data.copy() for name, p in params.items()}
    best_val = np.inf
    best_epoch = -1
    metrics: list[dict] = []
    stale = 0

    for epoch in range(config.epochs):
        order = np.random.default_rng([config.seed, 0xE0C, epoch]).permutation(len(train_samples))
        try:
            for start in range(0, len(order), config.batch_size):
                batch = [train_samples[i] for i in order[start : start + config.batch_size]]
                model.zero_grad()
                loss = model.batch_loss(batch, config.mu, config.q, flags)
                backward(loss)
                adam_step(params, model.grads(), config.lr, state)
        except NumericalFailureError as exc:
            for name, p in params.items():
                p.data = best[name].copy()
            return model, TrainResult(params=best, metrics=metrics,
                                      best_epoch=best_epoch, aborted=True,
                                      abort_reason=str(exc))

        row = {"epoch": epoch}
        for split_name, samples in (("train", train_samples),
                                    ("val", val_samples), ("test", test_samples)):
            if not samples:
                continue
            ev = evaluate(model, samples, q=config.q, flags=flags)
            for key in ("mse_3", "mse_7", "mse_15", "mse_30", "mean_mse", "var_pinball"):
                row[f"{split_name}_{key}"] = ev[key]
        metrics.append(row)

        watch = row.get("val_mean_mse", row["train_mean_mse"])
        if watch < best_val - 1e-15:
            best_val = watch
            best_epoch = epoch
            best = {name: p.data.copy() for name, p in params.items()}
            stale = 0
        else:
            stale += 1
            if stale >= config.early_stop_patience:
                break

    for name, p in params.items():
        p.data = best[name].copy()
    return model, TrainResult(params=best, metrics=metrics, best_epoch=best_epoch)


def write_metrics_csv(path, metrics: list) -> None:
    if not metrics:
        return
    cols = list(metrics[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in metrics:
            writer.writerow([row.get(c, "") for c in cols])


def _config_from_dims(manifest: DatasetManifest) -> ModelConfig:
    d = manifest.dims
    base = ModelConfig(
        audio_dim=d.audio_dim, text_dim=d.text_dim, analysis_dim=d.analysis_dim,
        news_dim=d.news_dim, audio_seq=d.audio_seq, text_seq=d.text_seq,
    )
    if d.audio_dim <= 16:  # fixture-scale data gets a proportionate network
        base = replace(base, n_heads=2, fusion_dim=8, lstm_hidden=4)
    return base
