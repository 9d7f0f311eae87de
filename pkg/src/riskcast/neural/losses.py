"""Multi-task training loss: volatility squared error plus VaR pinball."""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Tensor


def multitask_loss(vol_pred: Tensor, vol_true, var_pred: Tensor, var_true,
                   mu: float, q: float) -> Tensor:
    """mu * sum_i (vol_pred_i - vol_true_i)^2
       + (1 - mu) * max(q*(v - v_hat), (1-q)*(v_hat - v)).

    At the pinball kink (v == v_hat) the subgradient of the first branch is
    taken.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    vt = vol_true if isinstance(vol_true, Tensor) else Tensor(np.asarray(vol_true, dtype=np.float64))
    vrt = var_true if isinstance(var_true, Tensor) else Tensor(np.asarray(var_true, dtype=np.float64))
    diff = T.sub(vol_pred, vt)
    sq_sum = T.tsum(T.mul(diff, diff))
    pin = T.maximum(
        T.scale(T.sub(vrt, var_pred), q),
        T.scale(T.sub(var_pred, vrt), 1.0 - q),
    )
    return T.add(T.scale(sq_sum, mu), T.scale(pin, 1.0 - mu))
