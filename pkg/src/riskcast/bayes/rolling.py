"""Rolling-window next-day predictive simulation for the volatility VAR.

Protocol: a fixed trailing window of panel rows is fit by MCMC, the next
row's forward log-vols are predicted from its backward log-vols, the window
advances one row, and the cycle repeats for the requested number of
iterations. Per-horizon signed error percentages are summarized with the
same statistics as the reference AEP table: N, mean, sd, skewness, kurtosis
and the 5/25/50/75/95 percentiles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import InsufficientDataError
from ..market_math import ReturnSeries, aep
from .model import McmcConfig, PARAM_HORIZONS, VarModelSpec, alpha_name, beta_name
from .panel import LogVolPanel, build_panel, panel_from_arrays
from .sampler import sample_posterior

AEP_STAT_COLUMNS = ("variable", "n", "mean", "sd", "skewness", "kurtosis",
                    "p5", "p25", "p50", "p75", "p95")


@dataclass(frozen=True)
class RollingResult:
    predictions: np.ndarray   # (iterations, 4) predicted forward log-vols
    realized: np.ndarray      # (iterations, 4) realized forward log-vols
    target_rows: tuple        # panel row index of each prediction
    stats: list               # AEP stat rows, one per horizon


def aep_statistics(values, label: str) -> dict:
    """One AEP summary row over an array of signed error percentages."""
    x = np.asarray(values, dtype=np.float64)
    return {
        "variable": label,
        "n": int(x.size),
        "mean": float(x.mean()),
        "sd": float(x.std(ddof=1)) if x.size > 1 else 0.0,
        "skewness": float(stats.skew(x)),
        "kurtosis": float(stats.kurtosis(x)),
        "p5": float(np.percentile(x, 5)),
        "p25": float(np.percentile(x, 25)),
        "p50": float(np.percentile(x, 50)),
        "p75": float(np.percentile(x, 75)),
        "p95": float(np.percentile(x, 95)),
    }


def rolling_simulation(
    returns: ReturnSeries | LogVolPanel,
    spec: VarModelSpec,
    cfg: McmcConfig,
    window: int = 250,
    iterations: int = 100,
    predict_fn=None,
) -> RollingResult:
    """Run the rolling next-day protocol; emits exactly ``iterations``
    predictions.

    ``predict_fn(iteration, train_panel, backward_logvols) -> 4 predictions``
    replaces the MCMC fit when supplied (testing hook). Each iteration's
    sampler seed is derived from (cfg.seed, iteration) so runs are
    reproducible and iterations are independent.
    """
    panel = returns if isinstance(returns, LogVolPanel) else build_panel(returns)
    if len(panel) < window + iterations:
        raise InsufficientDataError(
            f"panel has {len(panel)} rows; rolling protocol needs {window + iterations}"
        )
    preds = np.empty((iterations, len(PARAM_HORIZONS)))
    reals = np.empty_like(preds)
    targets = []
    for k in range(iterations):
        train = panel_from_arrays(
            panel.backward[k : k + window],
            panel.forward[k : k + window],
            indices=panel.indices[k : k + window],
        )
        target = k + window
        x = panel.backward[target]
        if predict_fn is not None:
            preds[k] = np.asarray(predict_fn(k, train, x), dtype=np.float64)
        else:
            preds[k] = _predict_mean(train, spec, _iteration_cfg(cfg, k), x)
        reals[k] = panel.forward[target]
        targets.append(panel.indices[target])

    rows = []
    for j, m in enumerate(PARAM_HORIZONS):
        signed = [aep(preds[k, j], reals[k, j])[1] for k in range(iterations)]
        rows.append(aep_statistics(signed, f"{m}-Day"))
    return RollingResult(
        predictions=preds, realized=reals, target_rows=tuple(targets), stats=rows
    )


def _iteration_cfg(cfg: McmcConfig, k: int) -> McmcConfig:
    child = int(np.random.SeedSequence([cfg.seed, 7919, k]).generate_state(1)[0])
    return McmcConfig(
        n_chains=cfg.n_chains,
        n_warmup=cfg.n_warmup,
        n_draws=cfg.n_draws,
        seed=child,
        initial_step=cfg.initial_step,
        adapt_interval=cfg.adapt_interval,
        sigma_steps=cfg.sigma_steps,
    )


def _predict_mean(train: LogVolPanel, spec, cfg, x) -> np.ndarray:
    chains = sample_posterior(train, spec, cfg)
    out = np.empty(len(PARAM_HORIZONS))
    for j, m in enumerate(PARAM_HORIZONS):
        alpha = chains.flat(alpha_name(m))
        betas = np.stack([chains.flat(beta_name(m, k)) for k in PARAM_HORIZONS], axis=1)
        out[j] = float((alpha + betas @ x).mean())
    return out
