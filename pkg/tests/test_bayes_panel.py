import numpy as np
import pytest

from riskcast.bayes import build_panel, read_panel_csv, write_panel_csv
from riskcast.bayes.panel import panel_from_arrays
from riskcast.errors import EmptyPanelError, InsufficientDataError
from riskcast.market_math import LABEL_HORIZONS, compute_volatility

from test_market_math import make_returns


def test_short_series_insufficient():
    rets = make_returns(np.random.default_rng(0).normal(0, 0.02, 59).tolist())
    with pytest.raises(InsufficientDataError):
        build_panel(rets)


def test_backward_columns_match_vol_oracle():
    rng = np.random.default_rng(17)
    rets = make_returns(rng.normal(0, 0.02, 150).tolist())
    panel = build_panel(rets)
    assert len(panel) > 0
    for i, t in enumerate(panel.indices):
        for j, m in enumerate(LABEL_HORIZONS):
            assert panel.backward[i, j] == pytest.approx(
                compute_volatility(rets, t, m), abs=1e-12
            )
            assert panel.forward[i, j] == pytest.approx(
                compute_volatility(rets, t + m + 1, m), abs=1e-12
            )


def test_forward_window_is_strictly_future():
    # perturbing returns at or before t must not touch forward columns at t
    rng = np.random.default_rng(4)
    base = rng.normal(0, 0.02, 150)
    panel = build_panel(make_returns(base.tolist()))
    t0 = panel.indices[0]
    bumped = base.copy()
    bumped[: t0 + 1] += rng.normal(0, 0.01, t0 + 1)
    panel2 = build_panel(make_returns(bumped.tolist()))
    i2 = panel2.indices.index(t0)
    np.testing.assert_allclose(panel2.forward[i2], panel.forward[0], atol=1e-15)


def test_constant_returns_yield_empty_panel():
    rets = make_returns([0.01] * 150)
    panel = build_panel(rets)
    assert len(panel) == 0
    with pytest.raises(EmptyPanelError):
        panel.require_nonempty()


def test_row_count_accounting():
    # valid t spans [30, n-32]: n - 61 rows for a clean series
    rng = np.random.default_rng(8)
    n = 123
    panel = build_panel(make_returns(rng.normal(0, 0.02, n).tolist()))
    assert len(panel) == n - 61


def test_panel_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(29)
    panel = panel_from_arrays(rng.normal(-4, 0.3, (12, 4)), rng.normal(-4, 0.3, (12, 4)))
    path = tmp_path / "panel.csv"
    write_panel_csv(path, panel)
    loaded = read_panel_csv(path)
    assert loaded.indices == panel.indices
    np.testing.assert_allclose(loaded.backward, panel.backward, rtol=1e-10)
    np.testing.assert_allclose(loaded.forward, panel.forward, rtol=1e-10)
