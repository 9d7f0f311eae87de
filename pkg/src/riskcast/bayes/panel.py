"""Backward/forward realized log-volatility panel construction.

For each date index t of a return series the panel holds, per horizon
m in {3, 7, 15, 30}:

* backward column: log-vol of the window of m+1 returns ending at t
  (only data at or before t);
* forward column: log-vol of the window of m+1 returns starting at t+1,
  i.e. ending at t+m+1 (only data strictly after t).

Rows where any of the eight columns is undefined (insufficient window or
zero variance) are excluded.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateVolatilityError, EmptyPanelError, InsufficientDataError
from ..market_math import LABEL_HORIZONS, ReturnSeries, compute_volatility

_BWD_COLS = tuple(f"bwd_{m}" for m in LABEL_HORIZONS)
_FWD_COLS = tuple(f"fwd_{m}" for m in LABEL_HORIZONS)
PANEL_COLUMNS = _BWD_COLS + _FWD_COLS

# Returns consumed around each panel row: 30 back plus 31 strictly forward.
_MAX_H = max(LABEL_HORIZONS)
_BACK_SPAN = _MAX_H
_FWD_SPAN = _MAX_H + 1


@dataclass(frozen=True)
class LogVolPanel:
    """Rows of eight log-vol columns: four backward, four forward."""

    indices: tuple          # return-series index t of each row
    backward: np.ndarray    # (n_rows, 4), horizons 3/7/15/30
    forward: np.ndarray     # (n_rows, 4)

    def __post_init__(self):
        if self.backward.shape != (len(self.indices), 4):
            raise ValueError("backward block shape mismatch")
        if self.forward.shape != (len(self.indices), 4):
            raise ValueError("forward block shape mismatch")

    def __len__(self):
        return len(self.indices)

    def require_nonempty(self):
        if len(self) == 0:
            raise EmptyPanelError("log-volatility panel has no valid rows")
        return self


def build_panel(returns: ReturnSeries) -> LogVolPanel:
    """Build the eight-column panel from a return series.

    Raises InsufficientDataError when no index t can host both the 30-day
    backward window and the 30-day forward window.
    """
    n = len(returns)
    t_lo, t_hi = _BACK_SPAN, n - 1 - _FWD_SPAN
    if t_hi < t_lo:
        raise InsufficientDataError(
            f"{n} returns cannot host backward+forward 30-day windows"
        )
    rows, bwd, fwd = [], [], []
    for t in range(t_lo, t_hi + 1):
        try:
            b = [compute_volatility(returns, t, m) for m in LABEL_HORIZONS]
            f = [compute_volatility(returns, t + m + 1, m) for m in LABEL_HORIZONS]
        except (DegenerateVolatilityError, InsufficientDataError):
            continue
        rows.append(t)
        bwd.append(b)
        fwd.append(f)
    if not rows:
        return LogVolPanel(indices=(), backward=np.empty((0, 4)), forward=np.empty((0, 4)))
    return LogVolPanel(
        indices=tuple(rows),
        backward=np.asarray(bwd, dtype=np.float64),
        forward=np.asarray(fwd, dtype=np.float64),
    )


def panel_from_arrays(backward, forward, indices=None) -> LogVolPanel:
    """Assemble a panel directly from column arrays (synthetic data paths)."""
    backward = np.asarray(backward, dtype=np.float64)
    forward = np.asarray(forward, dtype=np.float64)
    if indices is None:
        indices = tuple(range(backward.shape[0]))
    return LogVolPanel(indices=tuple(indices), backward=backward, forward=forward)


def write_panel_csv(path, panel: LogVolPanel) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("index",) + PANEL_COLUMNS)
        for i, t in enumerate(panel.indices):
            cells = [str(t)]
            cells += [f"{v:.12g}" for v in panel.backward[i]]
            cells += [f"{v:.12g}" for v in panel.forward[i]]
            writer.writerow(cells)


def read_panel_csv(path) -> LogVolPanel:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index"] + list(PANEL_COLUMNS):
            raise ValueError(f"unexpected panel header: {header}")
        idx, bwd, fwd = [], [], []
        for row in reader:
            idx.append(int(row[0]))
            vals = [float(c) for c in row[1:]]
            bwd.append(vals[:4])
            fwd.append(vals[4:])
    if not idx:
        return LogVolPanel(indices=(), backward=np.empty((0, 4)), forward=np.empty((0, 4)))
    return LogVolPanel(
        indices=tuple(idx),
        backward=np.asarray(bwd, dtype=np.float64),
        forward=np.asarray(fwd, dtype=np.float64),
    )
