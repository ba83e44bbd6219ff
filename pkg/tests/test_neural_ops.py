import numpy as np
import pytest

from edl.errors import NonFiniteLoss, ShapeMismatch
from edl.neural.adadelta import AdaDelta, adadelta_update
from edl.neural.gradcheck import grad_check
from edl.neural.ops import (conv1d_backward, conv1d_forward, dense_backward,
                            dense_forward, gru_backward, gru_forward,
                            gru_init, log_softmax, softmax, softmax_xent)
from edl.neural.params import ParameterStore, glorot, uniform_init


class TestSoftmax:
    def test_uniform(self):
        assert np.allclose(softmax(np.array([0.0, 0.0])), [0.5, 0.5])

    def test_singleton(self):
        assert np.allclose(softmax(np.array([3.7])), [1.0])

    def test_no_overflow(self):
        p = softmax(np.array([1000.0, 0.0]))
        assert np.all(np.isfinite(p))
        assert p[0] > 0.999999 and abs(p.sum() - 1.0) < 1e-12

    def test_probability_vector_random(self, rng):
        for _ in range(50):
            v = rng.normal(scale=50.0, size=int(rng.integers(1, 30)))
            p = softmax(v)
            assert np.all(p > 0.0)
            assert abs(p.sum() - 1.0) < 1e-12

    def test_xent_gradient_is_p_minus_onehot(self, rng):
        logits = rng.normal(size=6)
        loss, dlogits = softmax_xent(logits, 2)
        p = softmax(logits)
        assert abs(loss + np.log(p[2])) < 1e-12
        expected = p.copy()
        expected[2] -= 1.0
        assert np.allclose(dlogits, expected)


class TestConv1d:
    def test_length_preserved(self, rng):
        kernel = rng.normal(size=(3, 4, 5))
        bias = rng.normal(size=5)
        for t in range(1, 9):
            out, _ = conv1d_forward(rng.normal(size=(t, 4)), kernel, bias)
            assert out.shape == (t, 5)

    def test_zero_kernel_gives_bias(self, rng):
        bias = rng.normal(size=5)
        out, _ = conv1d_forward(rng.normal(size=(4, 3)),
                                np.zeros((3, 3, 5)), bias)
        assert np.allclose(out, np.tile(bias, (4, 1)))

    def test_center_tap_identity(self, rng):
        d = 4
        kernel = np.zeros((3, d, d))
        kernel[1] = np.eye(d)
        x = rng.normal(size=(1, d))
        out, _ = conv1d_forward(x, kernel, np.zeros(d))
        assert np.allclose(out, x)

    def test_even_filter_rejected(self, rng):
        with pytest.raises(ShapeMismatch):
            conv1d_forward(rng.normal(size=(4, 3)),
                           rng.normal(size=(2, 3, 5)), np.zeros(5))

    def test_backward_matches_finite_differences(self, rng):
        x = rng.normal(size=(5, 3))
        kernel = rng.normal(size=(3, 3, 4))
        bias = rng.normal(size=4)
        dout = rng.normal(size=(5, 4))

        def loss(xv, kv, bv):
            out, _ = conv1d_forward(xv, kv, bv)
            return float((out * dout).sum())

        out, cache = conv1d_forward(x, kernel, bias)
        dx, dkernel, dbias = conv1d_backward(dout, cache)
        eps = 1e-6
        for arr, grad in ((x, dx), (kernel, dkernel), (bias, dbias)):
            flat, gflat = arr.reshape(-1), grad.reshape(-1)
            for c in range(0, flat.size, max(1, flat.size // 10)):
                orig = flat[c]
                flat[c] = orig + eps
                up = loss(x, kernel, bias)
                flat[c] = orig - eps
                down = loss(x, kernel, bias)
                flat[c] = orig
                assert abs((up - down) / (2 * eps) - gflat[c]) < 1e-6


class TestGru:
    def test_zero_params_zero_state(self):
        p = {k: np.zeros((3, 4)) if k.startswith("W")
             else (np.zeros((4, 4)) if k.startswith("U") else np.zeros(4))
             for k in ("Wz", "Uz", "bz", "Wr", "Ur", "br", "Wh", "Uh", "bh")}
        h, _ = gru_forward(np.zeros(4), np.ones(3), p)
        assert np.allclose(h, 0.0)

    def test_gate_saturation_keeps_state(self, rng):
        p = gru_init(rng, 3, 4)
        p["bz"] = np.full(4, -50.0)  # z ~ 0 -> h' ~ h
        h0 = rng.normal(size=4)
        h1, _ = gru_forward(h0, rng.normal(size=3), p)
        assert np.allclose(h1, h0, atol=1e-12)

    def test_jacobian_matches_finite_differences(self, rng):
        p = gru_init(rng, 3, 4)
        h0 = rng.normal(size=4)
        x = rng.normal(size=3)
        dout = rng.normal(size=4)
        _, cache = gru_forward(h0, x, p)
        dh, dx, grads = gru_backward(dout, cache)
        eps = 1e-6

        def loss(hv, xv):
            out, _ = gru_forward(hv, xv, p)
            return float((out * dout).sum())

        for arr, grad in ((h0, dh), (x, dx)):
            for c in range(arr.size):
                orig = arr[c]
                arr[c] = orig + eps
                up = loss(h0, x)
                arr[c] = orig - eps
                down = loss(h0, x)
                arr[c] = orig
                rel = abs((up - down) / (2 * eps) - grad[c]) / \
                    max(abs(grad[c]), 1e-8)
                assert rel < 1e-4
        for name, grad in grads.items():
            flat, gflat = p[name].reshape(-1), grad.reshape(-1)
            for c in range(flat.size):
                orig = flat[c]
                flat[c] = orig + eps
                up = loss(h0, x)
                flat[c] = orig - eps
                down = loss(h0, x)
                flat[c] = orig
                rel = abs((up - down) / (2 * eps) - gflat[c]) / \
                    max(abs(gflat[c]), 1e-8)
                assert rel < 1e-4


class TestDense:
    def test_zero_weights_sigmoid_half(self):
        out, _ = dense_forward(np.array([1.0, -2.0]), np.zeros((2, 3)),
                               np.zeros(3), "sigmoid")
        assert np.allclose(out, 0.5)

    def test_identity(self):
        x = np.array([1.0, 2.0, 3.0])
        out, _ = dense_forward(x, np.eye(3), np.zeros(3), "identity")
        assert np.allclose(out, x)

    def test_backward_all_activations(self, rng):
        for activation in ("sigmoid", "tanh", "relu", "identity"):
            x = rng.normal(size=4)
            w = rng.normal(size=(4, 3))
            b = rng.normal(size=3)
            dout = rng.normal(size=3)
            out, cache = dense_forward(x, w, b, activation)
            dx, dw, db = dense_backward(dout, cache)
            eps = 1e-6
            for arr, grad in ((x, dx), (w, dw), (b, db)):
                flat, gflat = arr.reshape(-1), grad.reshape(-1)
                for c in range(flat.size):
                    orig = flat[c]
                    flat[c] = orig + eps
                    up = float((dense_forward(x, w, b, activation)[0]
                                * dout).sum())
                    flat[c] = orig - eps
                    down = float((dense_forward(x, w, b, activation)[0]
                                  * dout).sum())
                    flat[c] = orig
                    rel = abs((up - down) / (2 * eps) - gflat[c]) / \
                        max(abs(gflat[c]), 1e-8)
                    assert rel < 1e-4

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatch):
            dense_forward(rng.normal(size=3), rng.normal(size=(4, 2)),
                          np.zeros(2))


class TestAdaDelta:
    def test_first_step_value(self):
        w = np.zeros(1)
        g = np.ones(1)
        eg, ed = np.zeros(1), np.zeros(1)
        delta = adadelta_update(w, g, eg, ed, rho=0.95, eps=1e-6)
        expected = -np.sqrt(1e-6 / (0.05 + 1e-6))
        assert abs(delta[0] - expected) < 1e-12
        assert abs(expected - (-4.4721e-3)) < 1e-6

    def test_zero_gradient_no_change(self, rng):
        w = rng.normal(size=5)
        before = w.copy()
        adadelta_update(w, np.zeros(5), np.zeros(5), np.zeros(5))
        assert np.array_equal(w, before)

    def test_mirrored_gradients(self, rng):
        g = rng.normal(size=4)
        w1, w2 = np.zeros(4), np.zeros(4)
        d1 = adadelta_update(w1, g, np.zeros(4), np.zeros(4))
        d2 = adadelta_update(w2, -g, np.zeros(4), np.zeros(4))
        assert np.allclose(d1, -d2)

    def test_accumulators_stay_nonnegative(self, rng):
        store = ParameterStore()
        store.add("w", rng.normal(size=6))
        opt = AdaDelta(store)
        for _ in range(100):
            store.zero_grads()
            store.add_grad("w", rng.normal(size=6) * 10)
            opt.step()
        assert np.all(opt.accum_grad_sq["w"] >= 0.0)
        assert np.all(opt.accum_update_sq["w"] >= 0.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            adadelta_update(np.zeros(3), np.zeros(4), np.zeros(3),
                            np.zeros(3))


class TestGradCheck:
    def test_quadratic_loss_exact(self, rng):
        store = ParameterStore()
        store.add("p", rng.normal(size=8))

        def loss():
            p = store["p"]
            store.add_grad("p", p)
            return 0.5 * float(p @ p)

        assert grad_check(loss, store, grad_floor=0.0) < 1e-9

    def test_nonfinite_loss_raises(self):
        store = ParameterStore()
        store.add("p", np.ones(2))

        def loss():
            return float("nan")

        with pytest.raises(NonFiniteLoss):
            grad_check(loss, store)


class TestParameterStore:
    def test_checkpoint_round_trip(self, tmp_path, rng):
        store = ParameterStore()
        store.add("a.b", rng.normal(size=(3, 4)))
        store.add("c", rng.normal(size=7))
        path = tmp_path / "model.ckpt"
        store.save(path, config_hash="abc123", seed=42)
        loaded, manifest = ParameterStore.load(path)
        assert manifest == {"config_hash": "abc123", "seed": "42"}
        for name in store.names():
            assert np.array_equal(loaded[name], store[name])

    def test_grad_shape_checked(self, rng):
        store = ParameterStore()
        store.add("w", rng.normal(size=(2, 2)))
        with pytest.raises(ShapeMismatch):
            store.add_grad("w", np.zeros(3))

    def test_glorot_bounds(self, rng):
        w = glorot(rng, (40, 60))
        limit = np.sqrt(6.0 / 100)
        assert np.all(np.abs(w) <= limit)
        e = uniform_init(rng, (10, 5))
        assert np.all(np.abs(e) <= 0.1)
