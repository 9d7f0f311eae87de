import numpy as np
import pytest

from riskcast.errors import FormatError
from riskcast.neural import backward, load_checkpoint, save_checkpoint
from riskcast.neural.model import FusionNetwork, ModalityFlags, ModelConfig

from helpers import TINY, away_from_pinball_kink, gradient_check, make_tiny_sample


def test_forward_shapes():
    rng = np.random.default_rng(0)
    model = FusionNetwork(TINY, seed=1)
    vol, var = model.forward(make_tiny_sample(rng))
    assert vol.shape == (4,)
    assert var.shape == ()


def test_gradient_check_full_network():
    rng = np.random.default_rng(1)
    model = FusionNetwork(TINY, seed=2)
    sample = make_tiny_sample(rng)
    assert away_from_pinball_kink(model, sample, 0.05)
    worst, name = gradient_check(model, [sample], mu=0.6, q=0.05,
                                 rng=np.random.default_rng(3))
    assert worst < 1e-4, f"worst relative error {worst} at {name}"


def test_gradient_check_batch_and_ablation():
    rng = np.random.default_rng(2)
    model = FusionNetwork(TINY, seed=3)
    samples = [make_tiny_sample(rng) for _ in range(3)]
    flags = ModalityFlags(use_news=False)
    worst, name = gradient_check(model, samples, mu=0.3, q=0.1, flags=flags,
                                 rng=np.random.default_rng(4), max_per_tensor=4)
    assert worst < 1e-4, f"worst relative error {worst} at {name}"


def test_constant_output_zero_gradients():
    # zeroing every projection/head weight makes the loss depend on
    # nothing but head biases; upstream parameters get zero gradient
    rng = np.random.default_rng(3)
    model = FusionNetwork(TINY, seed=4)
    model.heads.vol_w.data[:] = 0.0
    model.heads.var_w.data[:] = 0.0
    sample = make_tiny_sample(rng)
    model.zero_grad()
    loss = model.batch_loss([sample], mu=0.5, q=0.05)
    backward(loss)
    for name, p in model.named_params():
        if name.startswith(("audio", "text", "series", "fusion")):
            got = p.grad if p.grad is not None else np.zeros_like(p.data)
            np.testing.assert_allclose(got, np.zeros_like(p.data), atol=1e-15)


def test_deterministic_training_steps():
    from riskcast.neural import AdamState, adam_step

    def run():
        rng = np.random.default_rng(7)
        model = FusionNetwork(TINY, seed=5)
        samples = [make_tiny_sample(rng) for _ in range(4)]
        state = AdamState()
        params = model.params()
        for _ in range(10):
            model.zero_grad()
            loss = model.batch_loss(samples, mu=0.5, q=0.05)
            backward(loss)
            adam_step(params, model.grads(), 1e-3, state)
        return {n: p.data.copy() for n, p in params.items()}

    a, b = run(), run()
    for name in a:
        np.testing.assert_array_equal(a[name], b[name])


def test_masking_flag_changes_padded_outputs():
    rng = np.random.default_rng(4)
    cfg_masked = TINY
    cfg_literal = ModelCfg = ModelConfig(**{**TINY.__dict__, "mask_padding": False})
    sample = make_tiny_sample(rng)
    sample.audio_valid = 2  # force real padding
    sample.audio_emb[2:] = 0.0
    m1 = FusionNetwork(cfg_masked, seed=6)
    m2 = FusionNetwork(cfg_literal, seed=6)
    v1, _ = m1.forward(sample)
    v2, _ = m2.forward(sample)
    assert not np.allclose(v1.data, v2.data)


class TestCheckpoint:
    def test_roundtrip_bit_exact(self, tmp_path):
        model = FusionNetwork(TINY, seed=8)
        path = tmp_path / "model.rlck"
        model.save(path)
        loaded, version = load_checkpoint(path)
        assert version == 1
        for name, p in model.named_params():
            np.testing.assert_array_equal(loaded[name], p.data)

        clone = FusionNetwork(TINY, seed=99)
        clone.load(path)
        for (n1, p1), (n2, p2) in zip(model.named_params(), clone.named_params()):
            assert n1 == n2
            np.testing.assert_array_equal(p1.data, p2.data)

    def test_magic_and_truncation(self, tmp_path):
        model = FusionNetwork(TINY, seed=9)
        path = tmp_path / "model.rlck"
        model.save(path)
        blob = path.read_bytes()
        bad = tmp_path / "bad.rlck"
        bad.write_bytes(b"XXXX" + blob[4:])
        with pytest.raises(FormatError):
            load_checkpoint(bad)
        trunc = tmp_path / "trunc.rlck"
        trunc.write_bytes(blob[:-1])
        with pytest.raises(FormatError):
            load_checkpoint(trunc)

    def test_architecture_mismatch_rejected(self, tmp_path):
        model = FusionNetwork(TINY, seed=10)
        path = tmp_path / "model.rlck"
        save_checkpoint(path, {"not_a_layer": np.zeros(3)})
        with pytest.raises(ValueError):
            model.load(path)

    def test_deterministic_bytes(self, tmp_path):
        p1, p2 = tmp_path / "a.rlck", tmp_path / "b.rlck"
        FusionNetwork(TINY, seed=11).save(p1)
        FusionNetwork(TINY, seed=11).save(p2)
        assert p1.read_bytes() == p2.read_bytes()
