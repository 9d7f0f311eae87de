"""MCMC convergence diagnostics: split R-hat, bulk/tail ESS, MCSE, HDI.

R-hat defaults to the rank-normalized split form (max of the bulk statistic
and the folded statistic); ``method="legacy"`` recovers the plain
between-over-within variance ratio. ESS uses the autocorrelation-sum
estimator with Geyer's initial positive and monotone sequence criteria,
computed on rank-normalized split chains for the bulk and on tail-quantile
indicator draws for the tail.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import DiagnosticsUnavailableError
from .model import PARAM_HORIZONS, alpha_name, beta_name, sigma_name


@dataclass(frozen=True)
class PosteriorSummary:
    name: str
    mean: float
    sd: float
    hdi_3: float
    hdi_97: float
    mcse_mean: float
    mcse_sd: float
    ess_bulk: float
    ess_tail: float
    r_hat: float


def hdi(draws, prob: float = 0.94) -> tuple[float, float]:
    """Narrowest interval containing ``prob`` of the draws."""
    x = np.sort(np.asarray(draws, dtype=np.float64).reshape(-1))
    n = x.size
    if n == 0:
        raise ValueError("empty draw array")
    span = max(int(math.ceil(prob * n)), 1)
    if span >= n:
        return float(x[0]), float(x[-1])
    widths = x[span:] - x[: n - span]
    i = int(np.argmin(widths))
    return float(x[i]), float(x[i + span])


def split_chains(ary: np.ndarray) -> np.ndarray:
    """Halve each chain and stack the halves as separate chains."""
    ary = np.atleast_2d(np.asarray(ary, dtype=np.float64))
    half = ary.shape[1] // 2
    return np.vstack((ary[:, :half], ary[:, ary.shape[1] - half:]))


def rank_normalize(ary: np.ndarray) -> np.ndarray:
    """Map draws to normal scores via average ranks across all chains."""
    ary = np.asarray(ary, dtype=np.float64)
    rank = stats.rankdata(ary, method="average")
    z = stats.norm.ppf((rank - 0.5) / ary.size)
    return z.reshape(ary.shape)


def rhat(ary: np.ndarray, method: str = "rank") -> float:
    """Split R-hat of a (chains, draws) array.

    ``rank``   rank-normalized split R-hat (max of bulk and folded forms);
    ``split``  split R-hat on the raw draws;
    ``legacy`` plain between/within variance ratio without splitting.
    """
    ary = np.atleast_2d(np.asarray(ary, dtype=np.float64))
    if ary.shape[0] < 2:
        raise DiagnosticsUnavailableError("R-hat needs at least 2 chains")
    if method == "rank":
        bulk = _rhat_base(rank_normalize(split_chains(ary)))
        folded = _rhat_base(rank_normalize(split_chains(np.abs(ary - np.median(ary)))))
        return max(bulk, folded)
    if method == "split":
        return _rhat_base(split_chains(ary))
    if method == "legacy":
        chain_means = ary.mean(axis=1)
        between = np.var(chain_means, ddof=1) * ary.shape[1]
        within = np.mean(np.var(ary, axis=1, ddof=1))
        return float(between / within) if within > 0 else math.inf
    raise ValueError(f"unknown R-hat method {method!r}")


def _rhat_base(ary: np.ndarray) -> float:
    n_draw = ary.shape[1]
    chain_mean = ary.mean(axis=1)
    chain_var = np.var(ary, axis=1, ddof=1)
    within = np.mean(chain_var)
    if within == 0.0:
        return math.nan
    between = n_draw * np.var(chain_mean, ddof=1)
    var_plus = (n_draw - 1.0) / n_draw * within + between / n_draw
    return float(np.sqrt(var_plus / within))


def _autocov(x: np.ndarray) -> np.ndarray:
    """Biased autocovariance of one chain via FFT."""
    n = x.size
    m = 1 << (2 * n - 1).bit_length()
    xd = x - x.mean()
    f = np.fft.rfft(xd, m)
    return np.fft.irfft(f * np.conj(f), m)[:n] / n


def ess(ary: np.ndarray) -> float:
    """Autocorrelation-sum ESS of a (chains, draws) array.

    Uses Geyer's initial positive sequence followed by the initial monotone
    sequence adjustment, pooling autocovariances across chains.
    """
    ary = np.atleast_2d(np.asarray(ary, dtype=np.float64))
    n_chain, n_draw = ary.shape
    if n_draw < 4:
        raise DiagnosticsUnavailableError("ESS needs at least 4 draws per chain")
    acov = np.asarray([_autocov(ary[c]) for c in range(n_chain)])
    chain_mean = ary.mean(axis=1)
    mean_var = np.mean(acov[:, 0]) * n_draw / (n_draw - 1.0)
    var_plus = mean_var * (n_draw - 1.0) / n_draw
    if n_chain > 1:
        var_plus += np.var(chain_mean, ddof=1)
    if var_plus == 0.0:
        return math.nan

    rho_hat_t = np.zeros(n_draw)
    rho_hat_even = 1.0
    rho_hat_t[0] = rho_hat_even
    rho_hat_odd = 1.0 - (mean_var - np.mean(acov[:, 1])) / var_plus
    rho_hat_t[1] = rho_hat_odd

    t = 1
    while t < (n_draw - 2) and (rho_hat_even + rho_hat_odd) >= 0.0:
        rho_hat_even = 1.0 - (mean_var - np.mean(acov[:, t + 1])) / var_plus
        rho_hat_odd = 1.0 - (mean_var - np.mean(acov[:, t + 2])) / var_plus
        rho_hat_t[t + 1] = rho_hat_even
        if (rho_hat_even + rho_hat_odd) >= 0:
            rho_hat_t[t + 2] = rho_hat_odd
        t += 2
    max_t = t

    t = 1
    while t <= max_t - 2:
        if (rho_hat_t[t + 1] + rho_hat_t[t + 2]) > (rho_hat_t[t - 1] + rho_hat_t[t]):
            rho_hat_t[t + 1] = (rho_hat_t[t - 1] + rho_hat_t[t]) / 2.0
            rho_hat_t[t + 2] = rho_hat_t[t + 1]
        t += 2

    tau_hat = -1.0 + 2.0 * np.sum(rho_hat_t[:max_t]) + np.sum(rho_hat_t[max_t + 1 : max_t + 2])
    if np.isnan(rho_hat_t).any():
        return math.nan
    return float((n_chain * n_draw) / tau_hat)


def ess_bulk(ary: np.ndarray) -> float:
    return ess(rank_normalize(split_chains(ary)))


def ess_tail(ary: np.ndarray) -> float:
    """Min of the 5% and 95% quantile-indicator ESS values."""
    ary = np.atleast_2d(np.asarray(ary, dtype=np.float64))
    vals = []
    for prob in (0.05, 0.95):
        q = np.quantile(ary, prob)
        indicator = (ary <= q).astype(np.float64)
        vals.append(ess(rank_normalize(split_chains(indicator))))
    return min(vals)


def ess_mean(ary: np.ndarray) -> float:
    return ess(split_chains(ary))


def summarize_array(ary: np.ndarray, name: str = "") -> PosteriorSummary:
    """Full Table-style summary of one parameter's (chains, draws) draws."""
    ary = np.atleast_2d(np.asarray(ary, dtype=np.float64))
    if ary.shape[0] < 2:
        raise DiagnosticsUnavailableError("diagnostics need at least 2 chains")
    if ary.shape[1] < 4:
        raise DiagnosticsUnavailableError("diagnostics need at least 4 draws per chain")
    flat = ary.reshape(-1)
    sd = float(np.std(flat, ddof=1))
    e_mean = ess_mean(ary)
    e_sd = min(ess(split_chains(ary)), ess(split_chains(ary**2)))
    lo, hi = hdi(flat, 0.94)
    if e_sd > 1.0:
        mcse_sd = sd * math.sqrt(math.e * (1.0 - 1.0 / e_sd) ** (e_sd - 1.0) - 1.0)
    else:
        mcse_sd = math.nan
    return PosteriorSummary(
        name=name,
        mean=float(flat.mean()),
        sd=sd,
        hdi_3=lo,
        hdi_97=hi,
        mcse_mean=sd / math.sqrt(e_mean) if e_mean > 0 else math.nan,
        mcse_sd=mcse_sd,
        ess_bulk=ess_bulk(ary),
        ess_tail=ess_tail(ary),
        r_hat=rhat(ary),
    )


def diagnostics(chains) -> dict:
    """PosteriorSummary per parameter of a Chains object."""
    if chains.cfg.n_chains < 2:
        raise DiagnosticsUnavailableError("diagnostics need at least 2 chains")
    return {name: summarize_array(chains.draws(name), name) for name in chains.names()}


_LABELS = {m: f"{m}-Day" for m in PARAM_HORIZONS}


def summary_table(chains) -> list[dict]:
    """Rows in the summary-CSV schema, one per parameter, ordered by
    equation then regressor (intercept first)."""
    summaries = diagnostics(chains)
    rows = []
    for m in PARAM_HORIZONS:
        entries = [("Intercept", alpha_name(m))]
        entries += [(_LABELS[k], beta_name(m, k)) for k in PARAM_HORIZONS]
        if sigma_name(m) in summaries:
            entries.append(("Noise-Sd", sigma_name(m)))
        for label, pname in entries:
            s = summaries[pname]
            rows.append({
                "dependent": _LABELS[m],
                "independent": label,
                "n": chains.n_obs,
                "mean": s.mean,
                "sd": s.sd,
                "hdi_3": s.hdi_3,
                "hdi_97": s.hdi_97,
                "mcse_mean": s.mcse_mean,
                "mcse_sd": s.mcse_sd,
                "ess_bulk": s.ess_bulk,
                "ess_tail": s.ess_tail,
                "r_hat": s.r_hat,
            })
    return rows


SUMMARY_COLUMNS = ("dependent", "independent", "n", "mean", "sd", "hdi_3",
                   "hdi_97", "mcse_mean", "mcse_sd", "ess_bulk", "ess_tail", "r_hat")


def write_summary_csv(path, chains) -> None:
    """Summary CSV with numeric cells printed to 6 decimals."""
    rows = summary_table(chains)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            cells = [row["dependent"], row["independent"], str(row["n"])]
            cells += [f"{row[c]:.6f}" for c in SUMMARY_COLUMNS[3:]]
            writer.writerow(cells)
