"""Neural compute kernels with explicit streaming state.

Every layer has a streaming step (one frame, state in a StreamState) and a
batch form over a (T, C) sequence starting from zero state. Both forms run the
same grouped matrix products so their outputs agree to rounding error.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from app.core.errors import ShapeMismatchError
from app.core.state import StreamState

__all__ = [
    "ConvLayer",
    "GroupedGru",
    "conv_batch",
    "conv_step",
    "fc",
    "gru_batch",
    "gru_step",
    "prelu",
    "sigmoid",
]

KERNEL_TIME = 3


def sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


def prelu(x: np.ndarray, slope: np.ndarray) -> np.ndarray:
    """Per-channel PReLU over the last axis."""
    return np.where(x >= 0, x, slope * x)


def fc(weight: np.ndarray, bias: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """
    Affine map y = W x + b on one frame or a (T, in) sequence.

    Args:
        weight: (out, in) matrix
        bias: (out,) vector
        frame: (..., in) input

    Returns:
        (..., out) output
    """
    frame = np.asarray(frame)
    if weight.ndim != 2 or bias.shape != (weight.shape[0],):
        raise ShapeMismatchError(f"fc weight {weight.shape} and bias {bias.shape} disagree")
    if frame.shape[-1] != weight.shape[1]:
        raise ShapeMismatchError(f"fc expects {weight.shape[1]} inputs, got {frame.shape[-1]}")
    return frame @ weight.T + bias


# ---------------------------------------------------------------------------
# Causal grouped convolution over time
# ---------------------------------------------------------------------------


@dataclass
class ConvLayer:
    """Causal temporal Conv1D, kernel 3, channels as features.

    weight[o, i, tau] multiplies input channel i of frame t - tau.
    """

    name: str
    weight: np.ndarray
    bias: np.ndarray
    groups: int = 1
    packed: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        out_channels, in_per_group, taps = self.weight.shape
        if taps != KERNEL_TIME:
            raise ShapeMismatchError(f"{self.name}: kernel_time must be 3, got {taps}")
        if out_channels % self.groups:
            raise ShapeMismatchError(
                f"{self.name}: {out_channels} outputs not divisible by {self.groups}"
            )
        if self.bias.shape != (out_channels,):
            raise ShapeMismatchError(f"{self.name}: bias shape {self.bias.shape}")
        g, out_g = self.groups, out_channels // self.groups
        # (g, out_g, taps * in_g) in tap-major order [x_t, x_{t-1}, x_{t-2}]
        grouped = self.weight.reshape(g, out_g, in_per_group, taps)
        self.packed = np.ascontiguousarray(
            grouped.transpose(0, 1, 3, 2).reshape(g, out_g, taps * in_per_group)
        )

    @property
    def in_channels(self) -> int:
        return self.weight.shape[1] * self.groups

    @property
    def out_channels(self) -> int:
        return self.weight.shape[0]


def _check_channels(name: str, expected: int, actual: int) -> None:
    if expected != actual:
        raise ShapeMismatchError(f"{name}: expected {expected} input channels, got {actual}")


def conv_step(layer: ConvLayer, state: StreamState, frame: np.ndarray) -> np.ndarray:
    """
    One causal conv step using the two buffered past frames.

    Args:
        layer: Convolution layer
        state: Stream state with a history registered under layer.name
        frame: (in_channels,) current input frame

    Returns:
        (out_channels,) output frame
    """
    frame = np.asarray(frame)
    _check_channels(layer.name, layer.in_channels, frame.shape[-1])
    history = state.conv_history(layer.name)

    g = layer.groups
    stacked = np.stack([frame, history[0], history[1]])  # (taps, in)
    stacked = stacked.reshape(KERNEL_TIME, g, -1).transpose(1, 0, 2).reshape(g, -1)
    out = np.matmul(layer.packed, stacked[:, :, None])[:, :, 0].reshape(-1) + layer.bias

    history[1] = history[0]
    history[0] = frame
    return out


def conv_batch(layer: ConvLayer, x: np.ndarray) -> np.ndarray:
    """Causal conv over a whole (T, in_channels) sequence, zero history."""
    x = np.asarray(x)
    _check_channels(layer.name, layer.in_channels, x.shape[-1])
    n_frames = x.shape[0]
    g = layer.groups
    padded = np.concatenate([np.zeros((KERNEL_TIME - 1, x.shape[1]), dtype=x.dtype), x])

    # windows[t] = [x_t, x_{t-1}, x_{t-2}]
    first = KERNEL_TIME - 1
    windows = np.stack(
        [padded[first - tau : first - tau + n_frames] for tau in range(KERNEL_TIME)], axis=1
    )
    windows = windows.reshape(n_frames, KERNEL_TIME, g, -1).transpose(2, 0, 1, 3)
    windows = windows.reshape(g, n_frames, -1)
    out = np.matmul(windows, layer.packed.transpose(0, 2, 1))  # (g, T, out_g)
    return out.transpose(1, 0, 2).reshape(n_frames, -1) + layer.bias


# ---------------------------------------------------------------------------
# Grouped GRU
# ---------------------------------------------------------------------------


@dataclass
class GroupedGru:
    """GRU applied independently to channel groups, hidden size = input size.

    Gate rows are ordered update (z), reset (r), candidate (n).
    """

    name: str
    w_ih: np.ndarray  # (g, 3h, in_g)
    w_hh: np.ndarray  # (g, 3h, h)
    bias: np.ndarray  # (g, 3h)

    def __post_init__(self):
        g, rows, in_g = self.w_ih.shape
        if rows % 3 or self.w_hh.shape != (g, rows, rows // 3) or self.bias.shape != (g, rows):
            raise ShapeMismatchError(
                f"{self.name}: inconsistent GRU tensors {self.w_ih.shape}, "
                f"{self.w_hh.shape}, {self.bias.shape}"
            )

    @property
    def groups(self) -> int:
        return self.w_ih.shape[0]

    @property
    def input_size(self) -> int:
        return self.w_ih.shape[0] * self.w_ih.shape[2]

    @property
    def hidden_size(self) -> int:
        return self.w_hh.shape[0] * self.w_hh.shape[2]


def _gru_cell(gru: GroupedGru, gi: np.ndarray, h: np.ndarray) -> np.ndarray:
    # gi: (g, 3h) input projection incl. bias, h: (g, h)
    hs = h.shape[1]
    gh = np.matmul(gru.w_hh[:, : 2 * hs], h[:, :, None])[:, :, 0]
    z = sigmoid(gi[:, :hs] + gh[:, :hs])
    r = sigmoid(gi[:, hs : 2 * hs] + gh[:, hs:])
    n = np.tanh(gi[:, 2 * hs :] + np.matmul(gru.w_hh[:, 2 * hs :], (r * h)[:, :, None])[:, :, 0])
    return (1.0 - z) * h + z * n


def gru_step(gru: GroupedGru, state: StreamState, frame: np.ndarray) -> np.ndarray:
    """
    One GRU step; the new hidden vector is also the output.

    Args:
        gru: Grouped GRU layer
        state: Stream state with a hidden vector registered under gru.name
        frame: (input_size,) input frame

    Returns:
        (hidden_size,) output frame
    """
    frame = np.asarray(frame)
    _check_channels(gru.name, gru.input_size, frame.shape[-1])
    hidden = state.hidden(gru.name)
    g = gru.groups
    gi = np.matmul(gru.w_ih, frame.reshape(g, -1)[:, :, None])[:, :, 0] + gru.bias
    h = _gru_cell(gru, gi, hidden.reshape(g, -1)).reshape(-1)
    hidden[:] = h
    return h


def gru_batch(gru: GroupedGru, x: np.ndarray) -> np.ndarray:
    """GRU over a (T, input_size) sequence from a zero hidden state."""
    x = np.asarray(x)
    _check_channels(gru.name, gru.input_size, x.shape[-1])
    n_frames, g = x.shape[0], gru.groups
    # all input projections at once: (T, g, 3h)
    gi = np.einsum("gri,tgi->tgr", gru.w_ih, x.reshape(n_frames, g, -1)) + gru.bias
    h = np.zeros((g, gru.hidden_size // g), dtype=x.dtype)
    out = np.empty((n_frames, gru.hidden_size), dtype=np.result_type(x.dtype, gru.w_hh.dtype))
    for t in range(n_frames):
        h = _gru_cell(gru, gi[t], h)
        out[t] = h.reshape(-1)
    return out
