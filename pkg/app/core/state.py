"""Per-stream temporal state.

One StreamState belongs to exactly one stream. It holds the two-frame input
history of every causal conv, the hidden vector of every GRU, the analysis
buffer of the framer and the overlap-add tail of the synthesizer.
"""

from dataclasses import dataclass, field

import numpy as np

from app.core.errors import UninitializedStateError

CONV_HISTORY = 2


@dataclass
class StreamState:
    fft_size: int
    hop: int
    dtype: np.dtype = np.dtype(np.float64)
    conv_buffers: dict[str, np.ndarray] = field(default_factory=dict)
    gru_hidden: dict[str, np.ndarray] = field(default_factory=dict)
    analysis: np.ndarray = None
    ola_tail: np.ndarray = None
    samples_seen: int = 0

    def __post_init__(self):
        self.dtype = np.dtype(self.dtype)
        if self.analysis is None:
            self.analysis = np.zeros(self.fft_size - self.hop, dtype=self.dtype)
        if self.ola_tail is None:
            self.ola_tail = np.zeros(self.fft_size - self.hop, dtype=self.dtype)

    def register_conv(self, name: str, in_channels: int) -> None:
        # rows: x[t-1], x[t-2]
        self.conv_buffers[name] = np.zeros((CONV_HISTORY, in_channels), dtype=self.dtype)

    def register_gru(self, name: str, hidden_size: int) -> None:
        self.gru_hidden[name] = np.zeros(hidden_size, dtype=self.dtype)

    def conv_history(self, name: str) -> np.ndarray:
        try:
            return self.conv_buffers[name]
        except KeyError:
            raise UninitializedStateError(f"no conv history registered for '{name}'") from None

    def hidden(self, name: str) -> np.ndarray:
        try:
            return self.gru_hidden[name]
        except KeyError:
            raise UninitializedStateError(f"no GRU hidden state registered for '{name}'") from None

    def reset(self) -> None:
        """Zero every buffer in place; registrations are kept."""
        for buffer in self.conv_buffers.values():
            buffer.fill(0)
        for hidden in self.gru_hidden.values():
            hidden.fill(0)
        self.analysis.fill(0)
        self.ola_tail.fill(0)
        self.samples_seen = 0
