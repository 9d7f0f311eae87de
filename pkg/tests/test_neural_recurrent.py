import numpy as np
import pytest

from riskcast.neural import Tensor, bilstm_forward
from riskcast.neural.recurrent import SERIES_LEN, SequenceEncoderState


def lstm_oracle(x_seq, wx, wh, b, hidden):
    """Unrolled reference recurrence; returns the final hidden state."""
    def sig(z):
        return 1.0 / (1.0 + np.exp(-z))

    h = np.zeros(hidden)
    c = np.zeros(hidden)
    for x in x_seq:
        z = x @ wx + h @ wh + b
        i = sig(z[:hidden])
        f = sig(z[hidden : 2 * hidden])
        g = np.tanh(z[2 * hidden : 3 * hidden])
        o = sig(z[3 * hidden :])
        c = f * c + i * g
        h = o * np.tanh(c)
    return h


def series(rng):
    return rng.normal(size=(SERIES_LEN, 1))


def test_zero_weights_zero_output():
    state = SequenceEncoderState(np.random.default_rng(0), hidden=4)
    for cell in (state.fwd, state.bwd):
        cell.wx.data[:] = 0.0
        cell.wh.data[:] = 0.0
        cell.b.data[:] = 0.0
    out = bilstm_forward(state, Tensor(np.random.default_rng(1).normal(size=(SERIES_LEN, 1))))
    np.testing.assert_array_equal(out.data, np.zeros(8))


def test_matches_unrolled_oracle():
    rng = np.random.default_rng(2)
    state = SequenceEncoderState(np.random.default_rng(3), hidden=5)
    x = series(rng)
    out = bilstm_forward(state, Tensor(x)).data
    want_f = lstm_oracle(x, state.fwd.wx.data, state.fwd.wh.data, state.fwd.b.data, 5)
    want_b = lstm_oracle(x[::-1], state.bwd.wx.data, state.bwd.wh.data, state.bwd.b.data, 5)
    np.testing.assert_allclose(out[:5], want_f, atol=1e-10)
    np.testing.assert_allclose(out[5:], want_b, atol=1e-10)


def test_reversal_swaps_halves_with_shared_weights():
    rng = np.random.default_rng(4)
    state = SequenceEncoderState(np.random.default_rng(5), hidden=3, shared=True)
    x = series(rng)
    out = bilstm_forward(state, Tensor(x)).data
    out_rev = bilstm_forward(state, Tensor(x[::-1].copy())).data
    np.testing.assert_allclose(out_rev[:3], out[3:], atol=1e-12)
    np.testing.assert_allclose(out_rev[3:], out[:3], atol=1e-12)


def test_wrong_length_rejected():
    state = SequenceEncoderState(np.random.default_rng(6), hidden=2)
    with pytest.raises(ValueError):
        bilstm_forward(state, Tensor(np.zeros((SERIES_LEN - 1, 1))))


def test_default_output_dimension_is_128():
    state = SequenceEncoderState(np.random.default_rng(7))
    assert state.out_dim == 128
    out = bilstm_forward(state, Tensor(np.random.default_rng(8).normal(size=(SERIES_LEN, 1))))
    assert out.shape == (128,)
