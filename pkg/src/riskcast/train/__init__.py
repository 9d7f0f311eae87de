"""Dataset ingestion, batching, the multi-task training loop, grid search,
and ablation configurations."""

from .rlem import load_embedding_matrix, save_embedding_matrix
from .manifest import (
    DatasetManifest,
    Sample,
    SampleRecord,
    load_manifest,
    load_sample,
    save_manifest,
)
from .fixtures import FixtureSpec, generate_dataset, generate_price_csv
from .loop import TrainConfig, TrainResult, evaluate, train, write_metrics_csv
from .search import ABLATION_ROWS, ablation_run, grid_search

__all__ = [
    "load_embedding_matrix",
    "save_embedding_matrix",
    "DatasetManifest",
    "Sample",
    "SampleRecord",
    "load_manifest",
    "load_sample",
    "save_manifest",
    "FixtureSpec",
    "generate_dataset",
    "generate_price_csv",
    "TrainConfig",
    "TrainResult",
    "evaluate",
    "train",
    "write_metrics_csv",
    "ABLATION_ROWS",
    "ablation_run",
    "grid_search",
]
