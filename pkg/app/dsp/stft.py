"""Framed spectral analysis and synthesis.

Frame t covers samples [t*hop, t*hop + fft_size). There is no centre padding;
the last partial frame is zero-padded. Synthesis is weighted overlap-add with
the same periodic Hann window, normalised by the steady-state sum of squared
shifted windows so offline and streaming paths divide by identical values.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window

from app.core.errors import HopSizeMismatchError, ShapeMismatchError, SignalTooShortError
from app.core.settings import settings
from app.core.state import StreamState
from app.core.types import ComplexSpectrogram, Waveform

logger = logging.getLogger(__name__)

__all__ = [
    "hann_window",
    "istft",
    "istft_frame_push",
    "num_frames",
    "ola_normalizer",
    "stft",
    "stft_frame_push",
]


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _hann_cached(n: int) -> np.ndarray:
    window = get_window("hann", n, fftbins=True)
    window.setflags(write=False)
    return window


def hann_window(n: int) -> np.ndarray:
    """Periodic (DFT-even) Hann window of length n, read-only and cached."""
    return _hann_cached(n)


@lru_cache(maxsize=16)
def _normalizer_cached(fft_size: int, hop: int) -> np.ndarray:
    window = hann_window(fft_size)
    squared = window**2
    norm = np.zeros(hop)
    for offset in range(0, fft_size, hop):
        norm += squared[offset : offset + hop]
    norm.setflags(write=False)
    return norm


def ola_normalizer(fft_size: int, hop: int) -> np.ndarray:
    """Length-hop vector: sum over k of w[n + k*hop]^2."""
    _check_framing(fft_size, hop)
    return _normalizer_cached(fft_size, hop)


def _check_framing(fft_size: int, hop: int) -> None:
    if fft_size <= 0 or fft_size % 2:
        raise ValueError(f"fft_size must be a positive even number, got {fft_size}")
    if hop * 2 != fft_size:
        raise ValueError(f"hop must be fft_size / 2, got hop={hop} for fft_size={fft_size}")


# ---------------------------------------------------------------------------
# Offline
# ---------------------------------------------------------------------------


def num_frames(length: int, fft_size: int, hop: int) -> int:
    """T = ceil((length - fft_size) / hop) + 1."""
    if length < fft_size:
        raise SignalTooShortError(
            f"signal has {length} samples, shorter than one {fft_size}-sample frame"
        )
    return math.ceil((length - fft_size) / hop) + 1


def stft(
    wave: Waveform, fft_size: int = settings.FFT_SIZE, hop: int = settings.HOP_SIZE
) -> ComplexSpectrogram:
    """
    Hann-windowed short-time Fourier transform.

    Args:
        wave: Input waveform, at least fft_size samples long
        fft_size: Frame length and FFT size
        hop: Frame advance, must be fft_size / 2

    Returns:
        ComplexSpectrogram of shape (T, fft_size / 2 + 1)
    """
    _check_framing(fft_size, hop)
    samples = np.asarray(wave.samples)
    n_frames = num_frames(len(samples), fft_size, hop)
    padded_length = (n_frames - 1) * hop + fft_size
    padded = np.zeros(padded_length, dtype=np.result_type(samples.dtype, np.float32))
    padded[: len(samples)] = samples

    frames = sliding_window_view(padded, fft_size)[::hop]
    spectrum = np.fft.rfft(frames * hann_window(fft_size), axis=-1)
    return ComplexSpectrogram(spectrum, fft_size, hop)


def istft(spec: ComplexSpectrogram) -> Waveform:
    """
    Inverse STFT by weighted overlap-add.

    Args:
        spec: Complex spectrogram produced with hop = fft_size / 2

    Returns:
        Waveform of length (T - 1) * hop + fft_size
    """
    fft_size, hop = spec.fft_size, spec.hop
    _check_framing(fft_size, hop)
    n_frames = spec.num_frames
    frames = np.fft.irfft(spec.frames, n=fft_size, axis=-1) * hann_window(fft_size)

    length = (n_frames - 1) * hop + fft_size
    out = np.zeros(length, dtype=frames.dtype)
    # hop = fft/2: even and odd frames never overlap among themselves
    for half in range(2):
        chunk = frames[:, half * hop : (half + 1) * hop]
        out[half * hop : half * hop + n_frames * hop] += chunk.reshape(-1)

    norm = np.tile(ola_normalizer(fft_size, hop), length // hop)
    return Waveform(out / norm)


# ---------------------------------------------------------------------------
# Streaming
# ---------------------------------------------------------------------------


def stft_frame_push(state: StreamState, samples: np.ndarray) -> np.ndarray | None:
    """
    Push one hop of samples into the analysis buffer.

    Args:
        state: Stream state created for this fft_size/hop
        samples: Exactly hop new samples

    Returns:
        The next spectral frame once fft_size samples have been seen, else None
    """
    samples = np.asarray(samples)
    if samples.shape != (state.hop,):
        raise HopSizeMismatchError(
            f"expected a block of {state.hop} samples, got shape {samples.shape}"
        )
    frame = np.concatenate([state.analysis, samples])
    state.analysis[:] = frame[state.hop :]
    state.samples_seen += state.hop
    if state.samples_seen < state.fft_size:
        return None
    return np.fft.rfft(frame * hann_window(state.fft_size))


def istft_frame_push(state: StreamState, frame: np.ndarray) -> np.ndarray:
    """
    Synthesize one spectral frame and emit hop finished output samples.

    Args:
        state: Stream state holding the overlap-add tail
        frame: fft_size / 2 + 1 complex bins

    Returns:
        hop output samples
    """
    frame = np.asarray(frame)
    if frame.shape != (state.fft_size // 2 + 1,):
        raise ShapeMismatchError(
            f"expected a frame of {state.fft_size // 2 + 1} bins, got shape {frame.shape}"
        )
    hop = state.hop
    y = np.fft.irfft(frame, n=state.fft_size) * hann_window(state.fft_size)
    out = (y[:hop] + state.ola_tail) / ola_normalizer(state.fft_size, hop)
    state.ola_tail[:] = y[hop:]
    return out
