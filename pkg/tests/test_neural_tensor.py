import numpy as np
import pytest

from riskcast.errors import NumericalFailureError
from riskcast.neural import Tensor, backward
from riskcast.neural import tensor as T


def numeric_grad(f, x, h=1e-6):
    """Central finite differences of scalar f at array x."""
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + h
        fp = f()
        x[idx] = orig - h
        fm = f()
        x[idx] = orig
        g[idx] = (fp - fm) / (2 * h)
        it.iternext()
    return g


def check_op(build, *arrays, tol=1e-7):
    """build(*tensors) -> scalar Tensor; compare grads to finite differences."""
    tensors = [Tensor(a.copy()) for a in arrays]
    loss = build(*tensors)
    backward(loss)
    for t in tensors:
        got = t.grad

        def f(t=t):
            fresh = [Tensor(x.data) for x in tensors]
            # reuse the same underlying buffers so perturbations show up
            for ft, ot in zip(fresh, tensors):
                ft.data = ot.data
            return float(build(*fresh).data)

        want = numeric_grad(f, t.data)
        np.testing.assert_allclose(got, want, atol=tol, rtol=tol * 100)


class TestPrimitives:
    rng = np.random.default_rng(0)

    def test_add_mul_broadcast(self):
        a = self.rng.normal(size=(3, 4))
        b = self.rng.normal(size=(4,))
        check_op(lambda x, y: T.tsum(T.mul(T.add(x, y), T.add(x, y))), a, b)

    def test_matmul_2d(self):
        a = self.rng.normal(size=(3, 4))
        b = self.rng.normal(size=(4, 5))
        check_op(lambda x, y: T.tsum(T.matmul(x, y)), a, b)

    def test_matmul_vec_cases(self):
        a = self.rng.normal(size=(3, 4))
        v = self.rng.normal(size=4)
        u = self.rng.normal(size=3)
        check_op(lambda x, y: T.tsum(T.matmul(x, y)), a, v)
        check_op(lambda y, x: T.tsum(T.matmul(y, x)), u, a)
        check_op(lambda x, y: T.matmul(x, y), v, v.copy())

    def test_div_sqrt_exp_shift(self):
        a = np.abs(self.rng.normal(size=(4,))) + 0.5
        b = np.abs(self.rng.normal(size=(4,))) + 0.5
        check_op(lambda x, y: T.tsum(T.div(T.exp(T.scale(x, 0.3)), T.sqrt(T.shift(y, 1.0)))), a, b)

    def test_activations(self):
        a = self.rng.normal(size=(6,))
        check_op(lambda x: T.tsum(T.tanh(x)), a)
        check_op(lambda x: T.tsum(T.sigmoid(x)), a)
        a_off_kink = a + np.sign(a) * 0.1
        check_op(lambda x: T.tsum(T.relu(x)), a_off_kink)

    def test_maximum_subgradient(self):
        a = self.rng.normal(size=(5,)) + 2.0
        b = self.rng.normal(size=(5,)) - 2.0
        check_op(lambda x, y: T.tsum(T.maximum(x, y)), a, b)
        # tie goes to the first operand
        x, y = Tensor(np.array([1.0])), Tensor(np.array([1.0]))
        out = T.tsum(T.maximum(x, y))
        backward(out)
        assert x.grad[0] == 1.0 and y.grad[0] == 0.0

    def test_softmax_rows_sums_to_one(self):
        a = self.rng.normal(size=(5, 7))
        w = T.softmax_rows(Tensor(a))
        np.testing.assert_allclose(w.data.sum(axis=1), np.ones(5), atol=1e-12)
        weights = self.rng.normal(size=(5, 7))
        check_op(lambda x: T.tsum(T.mul(T.softmax_rows(x), Tensor(weights))), a)

    def test_softmax_masking(self):
        a = self.rng.normal(size=(3, 6))
        w = T.softmax_rows(Tensor(a), valid_len=4)
        assert np.all(w.data[:, 4:] == 0.0)
        np.testing.assert_allclose(w.data.sum(axis=1), np.ones(3), atol=1e-12)

    def test_rows_pool_slice_concat(self):
        a = self.rng.normal(size=(6, 3))
        check_op(lambda x: T.tsum(T.mean_rows(x, 4)), a)
        v = self.rng.normal(size=(8,))
        check_op(lambda x: T.tsum(T.mul(T.slice1d(x, 2, 6), T.slice1d(x, 2, 6))), v)
        check_op(lambda x: T.tsum(T.concat([T.slice1d(x, 0, 3), T.slice1d(x, 3, 8)])), v)
        m = self.rng.normal(size=(4, 2))
        n = self.rng.normal(size=(4, 3))
        check_op(lambda x, y: T.tsum(T.hstack([x, y])), m, n)

    def test_layernorm_helpers(self):
        a = self.rng.normal(size=(4, 5))
        check_op(lambda x: T.tsum(T.mean_last(x)), a)

    def test_shared_node_accumulates(self):
        x = Tensor(np.array(3.0))
        y = T.mul(x, x)          # x^2
        z = T.add(y, T.scale(x, 2.0))  # x^2 + 2x
        backward(z)
        assert x.grad == pytest.approx(2 * 3.0 + 2.0)

    def test_nonscalar_backward_rejected(self):
        with pytest.raises(ValueError):
            backward(Tensor(np.ones(3)))

    def test_nonfinite_loss_rejected(self):
        with pytest.raises(NumericalFailureError):
            backward(Tensor(np.asarray(np.inf)))

    def test_nonfinite_gradient_rejected(self):
        x = Tensor(np.array(0.0))
        out = T.div(Tensor(np.array(1.0)), x)  # 1/0 -> inf output
        with pytest.raises(NumericalFailureError):
            backward(out)
