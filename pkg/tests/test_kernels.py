"""Unit tests for conv, GRU and FC kernels against naive references."""

import numpy as np
import pytest

from app.core.errors import ShapeMismatchError, UninitializedStateError
from app.core.state import StreamState
from app.nn.kernels import (
    ConvLayer,
    GroupedGru,
    conv_batch,
    conv_step,
    fc,
    gru_batch,
    gru_step,
    prelu,
    sigmoid,
)


def conv_reference(weight, bias, groups, x):
    """Triple loop over frames, output channels and taps."""
    n_frames, in_channels = x.shape
    out_channels, in_g, taps = weight.shape
    out_g = out_channels // groups
    y = np.zeros((n_frames, out_channels))
    for t in range(n_frames):
        for o in range(out_channels):
            g = o // out_g
            acc = bias[o]
            for tau in range(taps):
                if t - tau < 0:
                    continue
                for i in range(in_g):
                    acc += weight[o, i, tau] * x[t - tau, g * in_g + i]
            y[t, o] = acc
    return y


def gru_reference(w_ih, w_hh, bias, x):
    """Per-group textbook GRU with gates ordered z, r, n."""
    groups, rows, in_g = w_ih.shape
    h_size = rows // 3
    h = np.zeros((groups, h_size))
    outputs = []
    for frame in x:
        new_h = np.zeros_like(h)
        for g in range(groups):
            xg = frame[g * in_g : (g + 1) * in_g]
            gi = w_ih[g] @ xg + bias[g]
            gh = w_hh[g] @ h[g]
            z = 1 / (1 + np.exp(-(gi[:h_size] + gh[:h_size])))
            r = 1 / (1 + np.exp(-(gi[h_size : 2 * h_size] + gh[h_size : 2 * h_size])))
            n = np.tanh(gi[2 * h_size :] + w_hh[g, 2 * h_size :] @ (r * h[g]))
            new_h[g] = (1 - z) * h[g] + z * n
        h = new_h
        outputs.append(h.reshape(-1).copy())
    return np.array(outputs)


def random_conv(rng):
    groups = int(rng.integers(1, 4))
    in_channels = groups * int(rng.integers(1, 5))
    out_channels = groups * int(rng.integers(1, 5))
    weight = rng.normal(size=(out_channels, in_channels // groups, 3))
    bias = rng.normal(size=out_channels)
    return ConvLayer("conv", weight, bias, groups)


def random_gru(rng):
    groups = int(rng.integers(1, 4))
    h = int(rng.integers(1, 5))
    return GroupedGru(
        "gru",
        rng.normal(size=(groups, 3 * h, h)),
        rng.normal(size=(groups, 3 * h, h)),
        rng.normal(size=(groups, 3 * h)),
    )


class TestActivations:
    """Test sigmoid and PReLU."""

    def test_sigmoid(self):
        """sigmoid(0) = 0.5 and extreme inputs saturate without overflow."""
        out = sigmoid(np.array([0.0, 1000.0, -1000.0]))
        np.testing.assert_allclose(out, [0.5, 1.0, 0.0])

    def test_prelu(self):
        """Negative inputs are scaled per channel."""
        out = prelu(np.array([[-1.0, 2.0, -3.0]]), np.array([0.25, 0.5, 0.0]))
        np.testing.assert_allclose(out, [[-0.25, 2.0, 0.0]])


class TestFc:
    """Test the dense layer."""

    def test_by_hand(self):
        """3x3 product checked element by element."""
        weight = np.array([[1.0, 0.0, 2.0], [0.0, -1.0, 0.0], [1.0, 1.0, 1.0]])
        bias = np.array([0.5, 0.0, -1.0])
        out = fc(weight, bias, np.array([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(out, [7.5, -2.0, 5.0])

    def test_zero_weights(self):
        """Zero weights return the bias."""
        out = fc(np.zeros((2, 4)), np.array([1.0, -1.0]), np.ones(4))
        np.testing.assert_array_equal(out, [1.0, -1.0])

    def test_sequence(self):
        """A (T, in) input maps row by row."""
        rng = np.random.default_rng(1)
        weight, bias, x = rng.normal(size=(3, 5)), rng.normal(size=3), rng.normal(size=(4, 5))
        expected = np.array([weight @ row + bias for row in x])
        np.testing.assert_allclose(fc(weight, bias, x), expected, atol=1e-12)

    def test_shape_mismatch(self):
        """Input width must equal the weight's column count."""
        with pytest.raises(ShapeMismatchError):
            fc(np.zeros((2, 4)), np.zeros(2), np.ones(3))


class TestConv:
    """Test the causal grouped convolution."""

    def setup_method(self):
        """Set up test data."""
        self.rng = np.random.default_rng(42)

    def test_matches_reference(self):
        """Batch and streaming forms match the triple loop over 120 random layers."""
        for _ in range(120):
            layer = random_conv(self.rng)
            x = self.rng.normal(size=(int(self.rng.integers(1, 8)), layer.in_channels))
            expected = conv_reference(layer.weight, layer.bias, layer.groups, x)
            np.testing.assert_allclose(conv_batch(layer, x), expected, atol=1e-9)

            state = StreamState(32, 16)
            state.register_conv(layer.name, layer.in_channels)
            streamed = np.array([conv_step(layer, state, frame) for frame in x])
            np.testing.assert_allclose(streamed, expected, atol=1e-9)

    def test_identity_kernel(self):
        """Weight 1 on the current tap only copies the input."""
        weight = np.zeros((3, 3, 3))
        for c in range(3):
            weight[c, c, 0] = 1.0
        layer = ConvLayer("id", weight, np.zeros(3))
        x = self.rng.normal(size=(5, 3))
        np.testing.assert_allclose(conv_batch(layer, x), x)

    def test_delay_kernel(self):
        """Weight 1 on the oldest tap delays by two frames."""
        weight = np.zeros((1, 1, 3))
        weight[0, 0, 2] = 1.0
        layer = ConvLayer("delay", weight, np.zeros(1))
        x = np.arange(1.0, 6.0)[:, None]
        np.testing.assert_allclose(conv_batch(layer, x)[:, 0], [0.0, 0.0, 1.0, 2.0, 3.0])

    def test_zero_weights(self):
        """Zero weights give the bias every frame."""
        layer = ConvLayer("zero", np.zeros((2, 4, 3)), np.array([0.5, -0.5]))
        out = conv_batch(layer, self.rng.normal(size=(3, 4)))
        np.testing.assert_array_equal(out, np.tile([0.5, -0.5], (3, 1)))

    def test_reset_restores_determinism(self):
        """After reset, the same input gives the same output."""
        layer = random_conv(self.rng)
        state = StreamState(32, 16)
        state.register_conv(layer.name, layer.in_channels)
        x = self.rng.normal(size=(4, layer.in_channels))
        first = np.array([conv_step(layer, state, f) for f in x])
        state.reset()
        second = np.array([conv_step(layer, state, f) for f in x])
        np.testing.assert_array_equal(first, second)

    def test_unregistered_state(self):
        """Stepping without a registered history fails loudly."""
        layer = ConvLayer("missing", np.zeros((1, 1, 3)), np.zeros(1))
        with pytest.raises(UninitializedStateError):
            conv_step(layer, StreamState(32, 16), np.zeros(1))

    def test_bad_kernel(self):
        """Only kernel_time 3 is accepted."""
        with pytest.raises(ShapeMismatchError):
            ConvLayer("bad", np.zeros((1, 1, 2)), np.zeros(1))

    def test_channel_mismatch(self):
        """Input width must match the layer."""
        layer = ConvLayer("c", np.zeros((2, 2, 3)), np.zeros(2))
        with pytest.raises(ShapeMismatchError):
            conv_batch(layer, np.zeros((3, 5)))


class TestGru:
    """Test the grouped GRU."""

    def setup_method(self):
        """Set up test data."""
        self.rng = np.random.default_rng(7)

    def test_matches_reference(self):
        """Batch and streaming forms match a naive GRU over 120 random layers."""
        for _ in range(120):
            gru = random_gru(self.rng)
            x = self.rng.normal(size=(int(self.rng.integers(1, 8)), gru.input_size))
            expected = gru_reference(gru.w_ih, gru.w_hh, gru.bias, x)
            np.testing.assert_allclose(gru_batch(gru, x), expected, atol=1e-9)

            state = StreamState(32, 16)
            state.register_gru(gru.name, gru.hidden_size)
            streamed = np.array([gru_step(gru, state, frame) for frame in x])
            np.testing.assert_allclose(streamed, expected, atol=1e-9)

    def test_zero_weights(self):
        """Zero weights give z = 0.5 and n = 0, so a zero hidden state stays zero."""
        gru = GroupedGru("z", np.zeros((2, 6, 2)), np.zeros((2, 6, 2)), np.zeros((2, 6)))
        out = gru_batch(gru, self.rng.normal(size=(5, 4)))
        np.testing.assert_array_equal(out, np.zeros((5, 4)))

    def test_output_bounded(self):
        """Hidden values stay inside (-1, 1)."""
        gru = random_gru(self.rng)
        out = gru_batch(gru, 100 * self.rng.normal(size=(20, gru.input_size)))
        assert np.all(np.abs(out) <= 1.0)

    def test_hidden_persists(self):
        """The stream state holds the latest output."""
        gru = random_gru(self.rng)
        state = StreamState(32, 16)
        state.register_gru(gru.name, gru.hidden_size)
        out = gru_step(gru, state, self.rng.normal(size=gru.input_size))
        np.testing.assert_array_equal(state.hidden(gru.name), out)

    def test_inconsistent_tensors(self):
        """Mismatched hidden weights are rejected."""
        with pytest.raises(ShapeMismatchError):
            GroupedGru("bad", np.zeros((1, 6, 2)), np.zeros((1, 6, 3)), np.zeros((1, 6)))
