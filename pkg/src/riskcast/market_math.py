"""Deterministic financial math: returns, realized log-volatility, quantile
loss, MSE, error percentages, and the empirical (historical) VaR baseline.

All functions here are pure; identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date as _date
from typing import Sequence

import numpy as np

from .errors import DegenerateVolatilityError, InsufficientDataError

# Forecast horizons (trading days) used for label construction.
LABEL_HORIZONS = (3, 7, 15, 30)


@dataclass(frozen=True)
class PriceSeries:
    """Adjusted close prices on strictly increasing calendar dates."""

    dates: tuple
    prices: tuple

    def __post_init__(self):
        if len(self.dates) != len(self.prices):
            raise ValueError("dates and prices must have equal length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if any(p <= 0 for p in self.prices):
            raise ValueError("prices must be strictly positive")

    def __len__(self):
        return len(self.prices)


@dataclass(frozen=True)
class ReturnSeries:
    """Daily simple returns, each aligned to the later of its two dates."""

    dates: tuple
    returns: tuple

    def __post_init__(self):
        if len(self.dates) != len(self.returns):
            raise ValueError("dates and returns must have equal length")
        if any(r <= -1.0 for r in self.returns):
            raise ValueError("simple returns must exceed -1")

    def __len__(self):
        return len(self.returns)

    def values(self) -> np.ndarray:
        return np.asarray(self.returns, dtype=np.float64)


def compute_returns(prices: PriceSeries) -> ReturnSeries:
    """Daily simple returns r_i = (p_{i+1} - p_i) / p_i.

    Raises InsufficientDataError with fewer than two prices.
    """
    if len(prices) < 2:
        raise InsufficientDataError("need at least 2 prices to compute returns")
    p = np.asarray(prices.prices, dtype=np.float64)
    rets = (p[1:] - p[:-1]) / p[:-1]
    return ReturnSeries(dates=tuple(prices.dates[1:]), returns=tuple(rets.tolist()))


def compute_volatility(
    returns: Sequence[float] | ReturnSeries,
    end_day: int,
    horizon: int,
    variance_floor: float | None = None,
) -> float:
    """Realized log-volatility over the window of ``horizon + 1`` returns
    ending at index ``end_day``.

        v = ln( sqrt( sum_{i=0..tau} (r_{d-i} - rbar)^2 / tau ) )

    The sum runs over tau+1 terms but is divided by tau; this deliberate
    convention is preserved rather than replaced by the usual n-1 sample
    variance.

    A zero-variance window raises DegenerateVolatilityError unless a
    positive ``variance_floor`` is supplied, in which case the variance is
    floored instead.
    """
    if horizon < 1:
        raise ValueError("horizon must be a positive number of days")
    r = returns.values() if isinstance(returns, ReturnSeries) else np.asarray(returns, dtype=np.float64)
    if end_day < 0 or end_day >= r.shape[0]:
        raise InsufficientDataError(f"end_day {end_day} outside available returns")
    if end_day - horizon < 0:
        raise InsufficientDataError(
            f"window of {horizon + 1} returns ending at {end_day} not available"
        )
    window = r[end_day - horizon : end_day + 1]
    rbar = window.mean()
    var = float(((window - rbar) ** 2).sum() / horizon)
    if var <= 0.0:
        if variance_floor is not None and variance_floor > 0.0:
            var = variance_floor
        else:
            raise DegenerateVolatilityError(
                f"zero sample variance in window ending at {end_day}"
            )
    return 0.5 * math.log(var)


def pinball_loss(y: float, y_hat: float, q: float) -> float:
    """Quantile (pinball) loss: q*(y - y_hat) if y >= y_hat else (1-q)*(y_hat - y)."""
    _check_quantile(q)
    if y >= y_hat:
        return q * (y - y_hat)
    return (1.0 - q) * (y_hat - y)


def mse(y: Sequence[float], y_hat: Sequence[float]) -> float:
    """Mean squared error over equal-length nonempty vectors."""
    ya = np.asarray(y, dtype=np.float64)
    yh = np.asarray(y_hat, dtype=np.float64)
    if ya.shape != yh.shape:
        raise ValueError(f"length mismatch: {ya.shape} vs {yh.shape}")
    if ya.size == 0:
        raise ValueError("mse of empty input is undefined")
    return float(((ya - yh) ** 2).mean())


def aep(y_hat: float, y: float) -> tuple[float, float]:
    """Error percentage of an estimate relative to the true value.

    Returns (absolute, signed) = (|y_hat - y| / y, (y_hat - y) / y). Both
    variants are reported: the absolute form divides by y as written, so it
    can be negative for negative y; the signed form is what summary tables
    of estimation bias actually need.
    """
    if y == 0.0:
        raise ZeroDivisionError("true value is zero; error percentage undefined")
    return (abs(y_hat - y) / y, (y_hat - y) / y)


def historical_var(returns: Sequence[float] | ReturnSeries, q: float) -> float:
    """Empirical q-quantile of the return distribution.

    Interpolation rule: the lower order statistic at index ceil(q*n) - 1 of
    the sorted sample (no interpolation).
    """
    _check_quantile(q)
    r = returns.values() if isinstance(returns, ReturnSeries) else np.asarray(returns, dtype=np.float64)
    n = r.shape[0]
    if n == 0:
        raise InsufficientDataError("empty return sample")
    idx = math.ceil(q * n) - 1
    idx = min(max(idx, 0), n - 1)
    return float(np.sort(r)[idx])


def exceedance_rate(
    returns: Sequence[float] | ReturnSeries, var_predictions: Sequence[float]
) -> float:
    """Fraction of days whose realized return falls strictly below the
    predicted VaR threshold."""
    r = returns.values() if isinstance(returns, ReturnSeries) else np.asarray(returns, dtype=np.float64)
    v = np.asarray(var_predictions, dtype=np.float64)
    if r.shape != v.shape:
        raise ValueError(f"length mismatch: {r.shape} vs {v.shape}")
    if r.size == 0:
        raise ValueError("empty input")
    return float(np.mean(r < v))


def _check_quantile(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q}")


# ---------------------------------------------------------------------------
# CSV interfaces


def read_price_csv(path) -> PriceSeries:
    """Read a price file with header ``date,adj_close`` (ISO-8601 dates)."""
    dates, prices = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["date", "adj_close"]:
            raise ValueError(f"expected header 'date,adj_close', got {reader.fieldnames}")
        for row in reader:
            dates.append(_date.fromisoformat(row["date"].strip()))
            prices.append(float(row["adj_close"]))
    return PriceSeries(dates=tuple(dates), prices=tuple(prices))


def write_label_csv(path, prices: PriceSeries, variance_floor: float | None = None) -> None:
    """Write realized log-volatility labels ``date,vol3,vol7,vol15,vol30``.

    One row per return date; cells are empty where the backward window is
    insufficient or degenerate.
    """
    rets = compute_returns(prices)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "vol3", "vol7", "vol15", "vol30"])
        for d in range(len(rets)):
            row = [rets.dates[d].isoformat()]
            for tau in LABEL_HORIZONS:
                try:
                    v = compute_volatility(rets, d, tau, variance_floor=variance_floor)
                    row.append(f"{v:.12g}")
                except (InsufficientDataError, DegenerateVolatilityError):
                    row.append("")
            writer.writerow(row)
