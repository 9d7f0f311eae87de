"""Synthetic dataset generator.

No real earnings-call corpus ships with the package; these fixtures
synthesize embedding files, labels and price series for tests, examples and
the CLI. Two planted modes create learnable structure:

* ``fusion`` — labels are an exact linear function of the analysis vector,
  all other modalities are constant across samples;
* ``vix``    — labels depend only on the index window, other modalities are
  per-sample noise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date as _date
from datetime import timedelta
from pathlib import Path

import numpy as np

from ..neural.recurrent import SERIES_LEN
from .manifest import DatasetManifest, Dims, SampleRecord, save_manifest
from .rlem import save_embedding_matrix, save_embedding_vector

PLANTED_MODES = (None, "fusion", "vix")


@dataclass(frozen=True)
class FixtureSpec:
    n_samples: int = 24
    seed: int = 0
    dims: Dims = field(default_factory=Dims)
    planted: str | None = None
    split_frac: float = 0.8
    start_date: _date = _date(2021, 1, 4)

    def __post_init__(self):
        if self.planted not in PLANTED_MODES:
            raise ValueError(f"planted must be one of {PLANTED_MODES}")
        if self.n_samples < 2:
            raise ValueError("need at least 2 samples")


def tiny_dims() -> Dims:
    return Dims(audio_seq=4, audio_dim=8, text_seq=4, text_dim=8,
                analysis_dim=8, news_dim=8)


def generate_dataset(out_dir, spec: FixtureSpec, with_news: bool = False) -> Path:
    """Write embedding files plus ``manifest.json``; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emb_dir = out_dir / "embeddings"
    emb_dir.mkdir(exist_ok=True)
    rng = np.random.default_rng([spec.seed, 0xF1C])
    d = spec.dims

    # planted structure shared across samples
    plant_matrix = rng.normal(0.0, 0.35 / np.sqrt(d.analysis_dim), size=(4, d.analysis_dim))
    plant_bias = np.array([-4.2, -4.0, -3.8, -3.6])
    vix_coefs = np.array([0.45, 0.35, 0.25, 0.15])
    const_audio = _padded(rng, d.audio_seq, d.audio_dim, valid=max(d.audio_seq // 2, 1))
    const_text = _padded(rng, d.text_seq, d.text_dim, valid=max(d.text_seq // 2, 1))

    records = []
    for i in range(spec.n_samples):
        day = spec.start_date + timedelta(days=i)
        stem = f"s{i:04d}"
        vix = 20.0 + np.cumsum(rng.normal(0.0, 0.8, size=SERIES_LEN))

        if spec.planted == "fusion":
            audio, audio_valid = const_audio
            text, text_valid = const_text
            answers = rng.standard_normal(d.analysis_dim).astype("<f4")
            labels = plant_matrix @ answers.astype(np.float64) + plant_bias
            next_return = float(0.01 * answers[: min(4, d.analysis_dim)].astype(np.float64).mean())
        elif spec.planted == "vix":
            audio, audio_valid = _padded(rng, d.audio_seq, d.audio_dim)
            text, text_valid = _padded(rng, d.text_seq, d.text_dim)
            answers = rng.standard_normal(d.analysis_dim).astype("<f4")
            signal = (vix.mean() - 20.0) / 2.0
            labels = vix_coefs * signal + plant_bias
            next_return = float(rng.normal(0.0, 0.02))
        else:
            audio, audio_valid = _padded(rng, d.audio_seq, d.audio_dim)
            text, text_valid = _padded(rng, d.text_seq, d.text_dim)
            answers = rng.standard_normal(d.analysis_dim).astype("<f4")
            labels = rng.normal(-4.0, 0.5, size=4)
            next_return = float(rng.normal(0.0, 0.02))

        summary = rng.standard_normal(d.analysis_dim).astype("<f4")
        paths = {
            "audio_path": f"embeddings/{stem}_audio.rlem",
            "text_path": f"embeddings/{stem}_text.rlem",
            "summary_path": f"embeddings/{stem}_summary.rlem",
            "answers_path": f"embeddings/{stem}_answers.rlem",
        }
        save_embedding_matrix(out_dir / paths["audio_path"], audio, audio_valid)
        save_embedding_matrix(out_dir / paths["text_path"], text, text_valid)
        save_embedding_vector(out_dir / paths["summary_path"], summary)
        save_embedding_vector(out_dir / paths["answers_path"], answers)
        news_path = None
        if with_news:
            news_path = f"embeddings/{stem}_news.rlem"
            save_embedding_vector(out_dir / news_path,
                                  rng.standard_normal(d.news_dim).astype("<f4"))
        records.append(SampleRecord(
            ticker="SYN",
            date=day,
            news_path=news_path,
            vix=tuple(vix.tolist()),
            vol_labels=tuple(np.asarray(labels, dtype=np.float64).tolist()),
            next_return=next_return,
            **paths,
        ))

    split_idx = max(int(spec.split_frac * spec.n_samples), 1)
    split_date = records[min(split_idx, spec.n_samples - 1)].date
    manifest = DatasetManifest(split_date=split_date, records=records,
                               dims=d, base_dir=out_dir)
    manifest_path = out_dir / "manifest.json"
    save_manifest(manifest_path, manifest)
    return manifest_path


def _padded(rng, seq, dim, valid=None):
    if valid is None:
        valid = int(rng.integers(max(seq // 2, 1), seq + 1))
    m = np.zeros((seq, dim), dtype="<f4")
    m[:valid] = rng.normal(0.0, 1.0, size=(valid, dim)).astype("<f4")
    return m, valid


def generate_price_csv(path, n_days: int, seed: int = 0,
                       start_date: _date = _date(2019, 1, 2),
                       daily_vol: float = 0.02, jump_at: int | None = None,
                       jump_size: float = 0.0) -> Path:
    """Geometric-random-walk price fixture with an optional planted jump."""
    rng = np.random.default_rng([seed, 0x9C7])
    steps = rng.normal(0.0, daily_vol, size=n_days)
    if jump_at is not None:
        steps[jump_at] += jump_size
    prices = 100.0 * np.exp(np.cumsum(steps))
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "adj_close"])
        for i, p in enumerate(prices):
            writer.writerow([(start_date + timedelta(days=i)).isoformat(), f"{p:.10f}"])
    return path
