"""Sample-synchronous streaming wrapper around BaeNet."""

import logging
from typing import BinaryIO

import numpy as np

from app.audio.io import read_raw, to_raw
from app.core.errors import UsageError
from app.dsp.stft import istft_frame_push, stft_frame_push
from app.model.graph import BaeNet

logger = logging.getLogger(__name__)


class StreamingExtender:
    """Push any number of samples, get the same number back.

    Output sample n is the extended signal at n - latency, where latency is
    2 * (fft_size - hop): one frame of analysis look-back plus one of
    overlap-add. Only complete hops are analysed.
    """

    def __init__(self, net: BaeNet):
        self.net = net
        self.hop = net.config.hop_size
        self.latency = 2 * (net.config.fft_size - net.config.hop_size)
        self.state = net.new_state()
        self.reset()

    def reset(self) -> None:
        self.state.reset()
        self._pending = np.zeros(0, dtype=self.net.dtype)
        self._ready = np.zeros(self.latency, dtype=self.net.dtype)

    def push(self, samples: np.ndarray) -> np.ndarray:
        """
        Feed input samples and collect the same number of output samples.

        Args:
            samples: 1-D block of any length

        Returns:
            Output block of equal length
        """
        samples = np.asarray(samples, dtype=self.net.dtype).reshape(-1)
        pending = np.concatenate([self._pending, samples])
        produced = [self._ready]
        start = 0
        while len(pending) - start >= self.hop:
            frame = stft_frame_push(self.state, pending[start : start + self.hop])
            start += self.hop
            if frame is not None:
                extended = self.net.forward_frame(frame, self.state)
                produced.append(istft_frame_push(self.state, extended).astype(self.net.dtype))
        self._pending = pending[start:].copy()

        ready = np.concatenate(produced)
        out, self._ready = ready[: len(samples)], ready[len(samples) :].copy()
        return out

    @property
    def buffered_samples(self) -> int:
        return len(self._pending) + len(self._ready)


def stream_raw(
    extender: StreamingExtender, src: BinaryIO, dst: BinaryIO, chunk_samples: int = 768
) -> int:
    """
    Pump raw float32 PCM from src through the extender into dst.

    Args:
        extender: Streaming engine
        src: Binary input stream
        dst: Binary output stream
        chunk_samples: Samples per read

    Returns:
        Number of samples written
    """
    if chunk_samples <= 0:
        raise UsageError(f"chunk size must be a positive number of samples, got {chunk_samples}")
    carry = b""
    written = 0
    while True:
        data = src.read(4 * chunk_samples)
        if not data:
            break
        data = carry + data
        usable = len(data) - len(data) % 4
        carry = data[usable:]
        if not usable:
            continue
        out = extender.push(read_raw(data[:usable]))
        dst.write(to_raw(out))
        dst.flush()
        written += len(out)
    if carry:
        logger.warning("dropped %d trailing bytes (not a whole float32 sample)", len(carry))
    logger.info("stream finished: %d samples", written)
    return written
