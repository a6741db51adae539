"""Domain types passed between the DSP, model and metric layers."""

from dataclasses import dataclass

import numpy as np

from app.core.errors import InvalidSignalError, ShapeMismatchError


def wrap_phase(phase: np.ndarray) -> np.ndarray:
    """Wrap angles to (-pi, pi].

    Values already inside the interval are returned bit-identical.
    """
    phase = np.array(phase, dtype=float, copy=True)
    outside = (phase <= -np.pi) | (phase > np.pi)
    if np.any(outside):
        phase[outside] = np.pi - np.mod(np.pi - phase[outside], 2 * np.pi)
    return phase


@dataclass
class Waveform:
    """Mono PCM signal.

    Args:
        samples: 1-D array of amplitudes, nominally in [-1, 1]
        sample_rate: Sampling rate in Hz
    """

    samples: np.ndarray
    sample_rate: int = 48000

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 1:
            raise ShapeMismatchError(f"waveform must be 1-D, got shape {self.samples.shape}")
        if self.sample_rate <= 0:
            raise InvalidSignalError(f"sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidSignalError("waveform contains NaN or Inf")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass
class ComplexSpectrogram:
    """T x F complex STFT frames."""

    frames: np.ndarray
    fft_size: int
    hop: int

    def __post_init__(self):
        self.frames = np.asarray(self.frames)
        if self.frames.ndim != 2 or self.frames.shape[1] != self.fft_size // 2 + 1:
            raise ShapeMismatchError(
                f"spectrogram must be T x {self.fft_size // 2 + 1}, got {self.frames.shape}"
            )
        if not np.all(np.isfinite(self.frames)):
            raise InvalidSignalError("spectrogram contains NaN or Inf")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def num_bins(self) -> int:
        return self.frames.shape[1]


@dataclass
class MagnitudeSpectrogram:
    frames: np.ndarray

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=float)
        if np.any(self.frames < 0):
            raise InvalidSignalError("magnitude spectrogram has negative values")


@dataclass
class PhaseSpectrogram:
    frames: np.ndarray

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=float)


def to_polar(spec: ComplexSpectrogram) -> tuple[MagnitudeSpectrogram, PhaseSpectrogram]:
    """Decouple a complex spectrogram into magnitude and wrapped phase."""
    magnitude = MagnitudeSpectrogram(np.abs(spec.frames))
    phase = PhaseSpectrogram(wrap_phase(np.angle(spec.frames)))
    return magnitude, phase


def from_polar(
    magnitude: MagnitudeSpectrogram, phase: PhaseSpectrogram, fft_size: int, hop: int
) -> ComplexSpectrogram:
    if magnitude.frames.shape != phase.frames.shape:
        raise ShapeMismatchError(
            f"magnitude {magnitude.frames.shape} and phase {phase.frames.shape} differ"
        )
    return ComplexSpectrogram(magnitude.frames * np.exp(1j * phase.frames), fft_size, hop)
