"""Bayesian vector autoregression of multi-horizon realized log-volatilities."""

from .panel import LogVolPanel, build_panel, read_panel_csv, write_panel_csv
from .model import VarModelSpec, McmcConfig, PARAM_HORIZONS
from .sampler import Chains, sample_posterior, posterior_predict
from .diagnostics import PosteriorSummary, diagnostics, summary_table, write_summary_csv
from .rolling import rolling_simulation, aep_statistics

__all__ = [
    "LogVolPanel",
    "build_panel",
    "read_panel_csv",
    "write_panel_csv",
    "VarModelSpec",
    "McmcConfig",
    "PARAM_HORIZONS",
    "Chains",
    "sample_posterior",
    "posterior_predict",
    "PosteriorSummary",
    "diagnostics",
    "summary_table",
    "write_summary_csv",
    "rolling_simulation",
    "aep_statistics",
]
