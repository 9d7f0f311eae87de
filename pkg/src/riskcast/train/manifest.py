"""Dataset manifests and sample loading.

A manifest is a JSON object: ``split_date``, a ``dims`` block declaring the
expected embedding shapes, and ``samples`` — an array of records with
embedding file paths (relative to the manifest), a 30-value index window,
four volatility labels, and the realized next-day return. Records may carry
an explicit ``split`` tag; otherwise the boundary date assigns it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date as _date
from pathlib import Path

import numpy as np

from ..errors import EmptyDatasetError, FormatError, SplitViolationError
from ..neural.recurrent import SERIES_LEN
from .rlem import load_embedding_matrix, load_embedding_vector


@dataclass(frozen=True)
class Dims:
    audio_seq: int = 520
    audio_dim: int = 512
    text_seq: int = 520
    text_dim: int = 768
    analysis_dim: int = 1024
    news_dim: int = 1024

    def to_json(self):
        return {
            "audio": [self.audio_seq, self.audio_dim],
            "text": [self.text_seq, self.text_dim],
            "analysis": self.analysis_dim,
            "news": self.news_dim,
        }

    @classmethod
    def from_json(cls, obj):
        if obj is None:
            return cls()
        return cls(
            audio_seq=obj["audio"][0], audio_dim=obj["audio"][1],
            text_seq=obj["text"][0], text_dim=obj["text"][1],
            analysis_dim=obj["analysis"], news_dim=obj["news"],
        )


@dataclass(frozen=True)
class SampleRecord:
    ticker: str
    date: _date
    audio_path: str
    text_path: str
    summary_path: str
    answers_path: str
    news_path: str | None
    vix: tuple
    vol_labels: tuple
    next_return: float
    split: str | None = None

    def to_json(self):
        obj = {
            "ticker": self.ticker,
            "date": self.date.isoformat(),
            "audio_path": self.audio_path,
            "text_path": self.text_path,
            "summary_path": self.summary_path,
            "answers_path": self.answers_path,
            "vix": list(self.vix),
            "vol_labels": list(self.vol_labels),
            "next_return": self.next_return,
        }
        if self.news_path is not None:
            obj["news_path"] = self.news_path
        if self.split is not None:
            obj["split"] = self.split
        return obj


@dataclass
class Sample:
    """One fully loaded observation."""

    ticker: str
    date: _date
    audio_emb: np.ndarray
    audio_valid: int
    text_emb: np.ndarray
    text_valid: int
    summary_emb: np.ndarray
    answers_emb: np.ndarray
    news_emb: np.ndarray | None
    vix: np.ndarray
    vol_labels: np.ndarray
    next_return: float


@dataclass
class DatasetManifest:
    split_date: _date
    records: list
    dims: Dims = field(default_factory=Dims)
    base_dir: Path = field(default_factory=Path)

    def train_records(self):
        return [r for r in self.records if _split_of(r, self.split_date) == "train"]

    def test_records(self):
        return [r for r in self.records if _split_of(r, self.split_date) == "test"]

    def validation_slice(self, frac: float = 0.1):
        """Last ``frac`` of the training span by date: (train', validation)."""
        train = sorted(self.train_records(), key=lambda r: r.date)
        n_val = max(int(round(frac * len(train))), 1) if len(train) > 1 else 0
        if n_val == 0:
            return train, []
        return train[:-n_val], train[-n_val:]


def _split_of(record: SampleRecord, split_date: _date) -> str:
    if record.split is not None:
        return record.split
    return "train" if record.date < split_date else "test"


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest is not valid JSON: {exc}") from exc
    try:
        split_date = _date.fromisoformat(obj["split_date"])
        dims = Dims.from_json(obj.get("dims"))
        records = []
        for rec in obj["samples"]:
            records.append(SampleRecord(
                ticker=rec["ticker"],
                date=_date.fromisoformat(rec["date"]),
                audio_path=rec["audio_path"],
                text_path=rec["text_path"],
                summary_path=rec["summary_path"],
                answers_path=rec["answers_path"],
                news_path=rec.get("news_path"),
                vix=tuple(float(v) for v in rec["vix"]),
                vol_labels=tuple(float(v) for v in rec["vol_labels"]),
                next_return=float(rec["next_return"]),
                split=rec.get("split"),
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed manifest record: {exc}") from exc
    manifest = DatasetManifest(split_date=split_date, records=records,
                               dims=dims, base_dir=path.parent)
    validate_manifest(manifest)
    return manifest


def validate_manifest(manifest: DatasetManifest) -> None:
    if not manifest.records:
        raise EmptyDatasetError("manifest contains no samples")
    for r in manifest.records:
        if len(r.vix) != SERIES_LEN:
            raise FormatError(f"{r.ticker} {r.date}: vix window must have {SERIES_LEN} values")
        if len(r.vol_labels) != 4:
            raise FormatError(f"{r.ticker} {r.date}: expected 4 volatility labels")
        if not all(np.isfinite(r.vol_labels)) or not np.isfinite(r.next_return):
            raise FormatError(f"{r.ticker} {r.date}: non-finite labels")
        if r.split not in (None, "train", "test"):
            raise FormatError(f"{r.ticker} {r.date}: bad split tag {r.split!r}")
    train_dates = [r.date for r in manifest.train_records()]
    test_dates = [r.date for r in manifest.test_records()]
    if train_dates and test_dates and max(train_dates) >= min(test_dates):
        raise SplitViolationError(
            f"train date {max(train_dates)} not before test date {min(test_dates)}"
        )


def save_manifest(path, manifest: DatasetManifest) -> None:
    obj = {
        "split_date": manifest.split_date.isoformat(),
        "dims": manifest.dims.to_json(),
        "samples": [r.to_json() for r in manifest.records],
    }
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_sample(record: SampleRecord, manifest: DatasetManifest) -> Sample:
    """Load a record's embedding files and validate against declared dims."""
    base = manifest.base_dir
    dims = manifest.dims
    audio, audio_valid = load_embedding_matrix(
        base / record.audio_path, (dims.audio_seq, dims.audio_dim))
    text, text_valid = load_embedding_matrix(
        base / record.text_path, (dims.text_seq, dims.text_dim))
    summary = load_embedding_vector(base / record.summary_path, dims.analysis_dim)
    answers = load_embedding_vector(base / record.answers_path, dims.analysis_dim)
    news = None
    if record.news_path is not None:
        news = load_embedding_vector(base / record.news_path, dims.news_dim)
    return Sample(
        ticker=record.ticker,
        date=record.date,
        audio_emb=audio,
        audio_valid=audio_valid,
        text_emb=text,
        text_valid=text_valid,
        summary_emb=summary,
        answers_emb=answers,
        news_emb=news,
        vix=np.asarray(record.vix, dtype=np.float64),
        vol_labels=np.asarray(record.vol_labels, dtype=np.float64),
        next_return=record.next_return,
    )
