"""
Tensor Autodiff Tests
=====================

Tests for the reverse-mode engine including:
- Tape recording and error handling
- Finite-difference checks of every primitive
- Convolution, transposed convolution and chunking
- Fused LSTM against the elementary reference cell
- JSON serialization of tensors
"""

import threading

import numpy as np
import pytest

from src.autodiff import (
    LstmParams,
    Tape,
    Tensor,
    backward,
    bilstm_seq,
    conv1d,
    conv_transpose1d,
    fold,
    grad_check,
    lstm_cell,
    lstm_seq,
    num_chunks,
    ops,
    tensor_from_json,
    tensor_to_json,
    unfold,
)
from src.errors import ShapeMismatchError, TapeError

TOL = 1e-4


def param(rng, *shape, scale=1.0):
    return Tensor(scale * rng.normal(size=shape), requires_grad=True)


def weighted(y: Tensor, seed: int = 7) -> Tensor:
    """Random linear functional of y, so every output entry matters."""
    w = np.random.default_rng(seed).normal(size=y.shape)
    return ops.sum(y * w)


def lstm_params(rng, features, hidden):
    return LstmParams(
        w_ih=param(rng, features, 4 * hidden, scale=0.4),
        w_hh=param(rng, hidden, 4 * hidden, scale=0.4),
        bias=param(rng, 4 * hidden, scale=0.1),
    )


# ============================================================
# TAPE
# ============================================================


class TestTape:
    """Test tape recording semantics."""

    def test_untracked_ops_are_not_recorded(self):
        """Without requires_grad nothing is taped."""
        with Tape() as tape:
            y = Tensor(np.ones(3)) * 2.0
        assert len(tape) == 0
        assert not y.requires_grad

    def test_no_tape_no_gradients(self):
        """Outside a tape, results do not require gradients."""
        x = Tensor(np.ones(3), requires_grad=True)
        assert not (x * 2.0).requires_grad

    def test_backward_accumulates_into_leaves(self):
        """backward fills .grad of leaf tensors."""
        x = Tensor(np.array([1.0, 2.0, 3.0]), requires_grad=True)
        with Tape():
            loss = ops.sum(x * x)
        backward(loss)
        np.testing.assert_allclose(x.grad, [2.0, 4.0, 6.0])

    def test_accumulate_false_leaves_grad_untouched(self):
        """accumulate=False returns gradients without writing .grad."""
        x = Tensor(np.ones(2), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum(x * 3.0)
            grads = tape.backward(loss, accumulate=False)
        np.testing.assert_allclose(grads[x], [3.0, 3.0])
        assert x.grad is None

    def test_reused_tensor_gradients_sum(self):
        """A tensor used twice receives the sum of both paths."""
        x = Tensor(np.array([2.0]), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum(x * x + x)
            grads = tape.backward(loss, accumulate=False)
        np.testing.assert_allclose(grads[x], [5.0])

    def test_backward_twice_raises(self):
        """A consumed tape cannot run backward again."""
        x = Tensor(np.ones(2), requires_grad=True)
        with Tape() as tape:
            loss = ops.sum(x)
            tape.backward(loss)
            with pytest.raises(TapeError, match="already"):
                tape.backward(loss)

    def test_reset_allows_reuse(self):
        """reset() clears a consumed tape."""
        x = Tensor(np.ones(2), requires_grad=True)
        with Tape() as tape:
            tape.backward(ops.sum(x), accumulate=False)
            tape.reset()
            grads = tape.backward(ops.sum(x * 2.0), accumulate=False)
        np.testing.assert_allclose(grads[x], [2.0, 2.0])

    def test_non_scalar_loss(self):
        """Only scalar losses can be differentiated."""
        x = Tensor(np.ones(2), requires_grad=True)
        with Tape() as tape:
            with pytest.raises(TapeError, match="scalar"):
                tape.backward(x * 2.0)

    def test_nested_tapes_rejected(self):
        """One tape per context."""
        with Tape():
            with pytest.raises(TapeError):
                with Tape():
                    pass

    def test_tapes_are_per_thread(self):
        """Threads record on their own tapes concurrently."""
        results = {}

        def work(k: int) -> None:
            x = Tensor(np.full(3, float(k)), requires_grad=True)
            with Tape() as tape:
                results[k] = tape.backward(ops.sum(x * x), accumulate=False)[x]

        threads = [threading.Thread(target=work, args=(k,)) for k in range(1, 5)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for k in range(1, 5):
            np.testing.assert_allclose(results[k], np.full(3, 2.0 * k))


# ============================================================
# PRIMITIVES
# ============================================================


class TestPrimitiveGradients:
    """Finite-difference checks of elementwise, reduction and shape ops."""

    @pytest.mark.parametrize(
        "f",
        [
            lambda x: ops.sum(ops.sigmoid(x)),
            lambda x: ops.sum(ops.tanh(x) * x),
            lambda x: ops.sum(ops.exp(x * 0.3)),
            lambda x: ops.sum(ops.log(x * x + 1.0)),
            lambda x: ops.sum(ops.sqrt(x * x + 0.5)),
            lambda x: ops.sum(ops.reciprocal(x * x + 1.0)),
            lambda x: ops.sum(-x * x),
        ],
        ids=["sigmoid", "tanh", "exp", "log", "sqrt", "reciprocal", "neg"],
    )
    def test_elementwise(self, rng, f):
        """Unary nonlinearities match central differences."""
        assert grad_check(f, param(rng, 3, 4)) < TOL

    def test_relu_away_from_kink(self, rng):
        """ReLU gradient is the positive mask."""
        x = Tensor(np.sign(rng.normal(size=(3, 4))) * rng.uniform(0.1, 1.0, size=(3, 4)), requires_grad=True)
        assert grad_check(lambda t: weighted(ops.relu(t)), x) < TOL

    def test_prelu_input_and_slope(self, rng):
        """PReLU differentiates in both input and slope."""
        x = Tensor(np.sign(rng.normal(size=(3, 5))) * rng.uniform(0.1, 1.0, size=(3, 5)), requires_grad=True)
        slope = Tensor(np.array([0.25]), requires_grad=True)
        assert grad_check(lambda t: weighted(ops.prelu(t, slope)), x) < TOL
        assert grad_check(lambda s: weighted(ops.prelu(x, s)), slope) < TOL

    def test_broadcast_arithmetic(self, rng):
        """add, sub, mul and div reduce broadcast gradients."""
        a, b = param(rng, 3, 4), param(rng, 4)
        c = Tensor(rng.uniform(1.0, 2.0, size=(3, 1)), requires_grad=True)
        f_b = lambda t: weighted((a + t) * a - t / c)  # noqa: E731
        f_c = lambda t: weighted(a / t - t * b)  # noqa: E731
        assert grad_check(f_b, b) < TOL
        assert grad_check(f_c, c) < TOL

    def test_broadcast_mismatch(self):
        """Incompatible shapes raise ShapeMismatchError."""
        with pytest.raises(ShapeMismatchError):
            ops.add(Tensor(np.ones(3)), Tensor(np.ones(4)))

    def test_matmul(self, rng):
        """Batched matmul gradients for both operands."""
        a, b = param(rng, 2, 3, 4), param(rng, 4, 5)
        assert grad_check(lambda t: weighted(t @ b), a) < TOL
        assert grad_check(lambda t: weighted(a @ t), b) < TOL

    def test_matmul_shape_error(self):
        """Inner dimensions must agree."""
        with pytest.raises(ShapeMismatchError):
            Tensor(np.ones((2, 3))) @ Tensor(np.ones((4, 2)))

    @pytest.mark.parametrize("axis,keepdims", [(None, False), (0, False), (1, True), ((0, 2), False)])
    def test_reductions(self, rng, axis, keepdims):
        """sum and mean over any axes."""
        x = param(rng, 2, 3, 4)
        assert grad_check(lambda t: weighted(ops.sum(t, axis=axis, keepdims=keepdims) * 1.0), x) < TOL
        assert grad_check(lambda t: weighted(ops.mean(t, axis=axis, keepdims=keepdims) * 1.0), x) < TOL

    def test_cumsum(self, rng):
        """Cumulative sum along an axis."""
        assert grad_check(lambda t: weighted(ops.cumsum(t, axis=1)), param(rng, 3, 6)) < TOL

    def test_shape_ops(self, rng):
        """concat, index, transpose, reshape and pad."""
        x, y = param(rng, 2, 3), param(rng, 2, 2)
        assert grad_check(lambda t: weighted(ops.concat([t, y], axis=1)), x) < TOL
        assert grad_check(lambda t: weighted(t[:, 1:]), x) < TOL
        assert grad_check(lambda t: weighted(t[np.array([0, 0, 1])]), x) < TOL
        assert grad_check(lambda t: weighted(ops.transpose(t)), x) < TOL
        assert grad_check(lambda t: weighted(ops.reshape(t, (3, 2))), x) < TOL
        assert grad_check(lambda t: weighted(ops.pad(t, [(1, 0), (0, 2)])), x) < TOL

    def test_pad_keeps_values(self):
        """Padding adds zeros around the original values."""
        out = ops.pad(Tensor(np.ones((1, 2))), [(0, 0), (1, 1)])
        np.testing.assert_array_equal(out.data, [[0.0, 1.0, 1.0, 0.0]])

    def test_reshape_error(self):
        """Reshape to a different size is rejected."""
        with pytest.raises(ShapeMismatchError):
            ops.reshape(Tensor(np.ones(6)), (4,))


# ============================================================
# CONVOLUTION AND CHUNKING
# ============================================================


class TestConvolution:
    """Test 1-D convolutions and the unfold/fold pair."""

    def test_conv1d_matches_numpy(self, rng):
        """Single-channel conv1d is a correlation."""
        x, w = rng.normal(size=(1, 20)), rng.normal(size=(1, 1, 3))
        out = conv1d(Tensor(x), Tensor(w))
        expected = np.correlate(x[0], w[0, 0], mode="valid")
        np.testing.assert_allclose(out.data[0], expected, atol=1e-12)

    @pytest.mark.parametrize(
        "stride,dilation,groups,pads",
        [(1, 1, 1, (0, 0)), (2, 1, 1, (1, 1)), (1, 2, 1, (4, 0)), (1, 1, 4, (1, 1)), (1, 3, 2, (6, 0))],
    )
    def test_conv1d_gradients(self, rng, stride, dilation, groups, pads):
        """Strided, dilated, grouped and padded convolutions."""
        x = param(rng, 4, 12)
        w = param(rng, 4, 4 // groups, 3)
        b = param(rng, 4)

        def f_x(t):
            return weighted(conv1d(t, w, b, stride, dilation, groups, *pads))

        def f_w(t):
            return weighted(conv1d(x, t, b, stride, dilation, groups, *pads))

        def f_b(t):
            return weighted(conv1d(x, w, t, stride, dilation, groups, *pads))

        assert grad_check(f_x, x) < TOL
        assert grad_check(f_w, w) < TOL
        assert grad_check(f_b, b) < TOL

    def test_causal_padding_preserves_length(self, rng):
        """Left padding of d(P-1) keeps T frames."""
        out = conv1d(Tensor(rng.normal(size=(2, 10))), Tensor(rng.normal(size=(2, 1, 3))), groups=2, dilation=2, left_pad=4)
        assert out.shape == (2, 10)

    def test_conv1d_group_error(self, rng):
        """Channel counts must divide into groups."""
        with pytest.raises(ShapeMismatchError):
            conv1d(Tensor(np.ones((3, 10))), Tensor(np.ones((4, 1, 3))), groups=2)

    def test_conv_transpose1d(self, rng):
        """Transposed convolution length and gradients."""
        x, w = param(rng, 3, 6), param(rng, 3, 1, 8)
        out = conv_transpose1d(x, w, stride=4)
        assert out.shape == (1, 5 * 4 + 8)
        assert grad_check(lambda t: weighted(conv_transpose1d(t, w, stride=4)), x) < TOL
        assert grad_check(lambda t: weighted(conv_transpose1d(x, t, stride=4)), w) < TOL

    def test_num_chunks(self):
        """One chunk up to K frames, then ceil((T-K)/hop)+1."""
        assert num_chunks(3, 4, 2) == 1
        assert num_chunks(4, 4, 2) == 1
        assert num_chunks(5, 4, 2) == 2
        assert num_chunks(100, 30, 15) == 6

    def test_unfold_layout(self):
        """Chunk s frame k holds frame s*hop + k."""
        x = Tensor(np.arange(20, dtype=np.float64).reshape(2, 10))
        chunks = unfold(x, 4, 2)
        assert chunks.shape == (4, 4, 2)
        np.testing.assert_array_equal(chunks.data[1, :, 0], [2, 3, 4, 5])
        np.testing.assert_array_equal(chunks.data[3, :, 1], [16, 17, 18, 19])

    def test_fold_of_unfold_counts_overlaps(self, rng):
        """fold(unfold(x)) multiplies each frame by its chunk coverage."""
        x = rng.normal(size=(3, 11))
        back = fold(unfold(Tensor(x), 4, 2), 11, 2)
        coverage = fold(unfold(Tensor(np.ones((1, 11))), 4, 2), 11, 2).data
        np.testing.assert_allclose(back.data, x * coverage, atol=1e-12)

    def test_unfold_fold_gradients(self, rng):
        """Both chunking ops pass finite-difference checks."""
        x = param(rng, 3, 11)
        chunks = param(rng, 5, 4, 3)
        assert grad_check(lambda t: weighted(unfold(t, 4, 2)), x) < TOL
        assert grad_check(lambda t: weighted(fold(t, 11, 2)), chunks) < TOL

    def test_fold_count_mismatch(self):
        """fold rejects a chunk count that does not fit the length."""
        with pytest.raises(ShapeMismatchError):
            fold(Tensor(np.ones((2, 4, 1))), 20, 2)


# ============================================================
# LSTM
# ============================================================


class TestLstm:
    """Test the fused LSTM against the reference cell."""

    def test_fused_matches_cell(self, rng):
        """lstm_seq equals stepping lstm_cell."""
        p = lstm_params(rng, 3, 4)
        x = rng.normal(size=(2, 5, 3))
        h = Tensor(np.zeros((2, 4)))
        c = Tensor(np.zeros((2, 4)))
        steps = []
        for t in range(5):
            h, c = lstm_cell(Tensor(x[:, t, :]), h, c, p)
            steps.append(h.data)
        np.testing.assert_allclose(lstm_seq(Tensor(x), p).data, np.stack(steps, axis=1), atol=1e-12)

    def test_reverse_is_time_flip(self, rng):
        """reverse=True equals running on the flipped sequence."""
        p = lstm_params(rng, 3, 2)
        x = rng.normal(size=(1, 6, 3))
        rev = lstm_seq(Tensor(x), p, reverse=True).data
        flipped = lstm_seq(Tensor(x[:, ::-1, :].copy()), p).data[:, ::-1, :]
        np.testing.assert_allclose(rev, flipped, atol=1e-12)

    @pytest.mark.parametrize("reverse", [False, True])
    def test_fused_gradients(self, rng, reverse):
        """Input and all three weights pass finite-difference checks."""
        p = lstm_params(rng, 3, 4)
        x = param(rng, 2, 5, 3)
        assert grad_check(lambda t: weighted(lstm_seq(t, p, reverse)), x) < TOL
        for tensor in (p.w_ih, p.w_hh, p.bias):
            assert grad_check(lambda _: weighted(lstm_seq(x, p, reverse)), tensor) < TOL

    def test_two_dimensional_input(self, rng):
        """A (T x F) input is a batch of one."""
        p = lstm_params(rng, 3, 2)
        assert lstm_seq(Tensor(rng.normal(size=(7, 3))), p).shape == (7, 2)

    def test_bidirectional_concat(self, rng):
        """bilstm_seq concatenates both directions."""
        fwd, bwd = lstm_params(rng, 3, 2), lstm_params(rng, 3, 2)
        x = param(rng, 1, 4, 3)
        assert bilstm_seq(x, fwd, bwd).shape == (1, 4, 4)
        assert grad_check(lambda t: weighted(bilstm_seq(t, fwd, bwd)), x) < TOL

    def test_bad_packing(self, rng):
        """Weights must be packed as 4H columns."""
        p = LstmParams(w_ih=param(rng, 3, 8), w_hh=param(rng, 2, 6), bias=param(rng, 8))
        with pytest.raises(ShapeMismatchError):
            lstm_seq(Tensor(np.ones((1, 2, 3))), p)


class TestSerialization:
    """Test JSON tensor dumps."""

    def test_round_trip(self, rng):
        """Shape and values survive a JSON round trip."""
        t = Tensor(rng.normal(size=(2, 3)))
        back = tensor_from_json(tensor_to_json(t))
        assert back.shape == (2, 3)
        np.testing.assert_array_equal(back.data, t.data)

    def test_size_mismatch(self):
        """Data length must match the declared shape."""
        with pytest.raises(ShapeMismatchError):
            tensor_from_json({"shape": [2, 2], "data": [1.0, 2.0]})
