"""ERB band rearrangement and flipped-phase high-band construction."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from app.core.errors import AudioIOError, ShapeMismatchError
from app.core.types import MagnitudeSpectrogram, wrap_phase

logger = logging.getLogger(__name__)

__all__ = [
    "ErbBands",
    "ErbFilterBank",
    "build_erb_bank",
    "erb_analyze",
    "erb_rate",
    "erb_rate_to_hz",
    "export_erb_bank",
    "flip_phase",
]


# ---------------------------------------------------------------------------
# ERB filter bank
# ---------------------------------------------------------------------------


def erb_rate(hz):
    """Glasberg-Moore ERB-rate: 21.4 * log10(1 + 0.00437 f)."""
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(hz, dtype=float))


def erb_rate_to_hz(erb):
    return (10.0 ** (np.asarray(erb, dtype=float) / 21.4) - 1.0) / 0.00437


@dataclass(frozen=True)
class ErbFilterBank:
    """Triangular ERB bank.

    Args:
        matrix: (num_bands, num_bins) non-negative weights, rows sum to 1
        band_centers: Centre frequency of each band in Hz
    """

    matrix: np.ndarray
    band_centers: np.ndarray

    @property
    def num_bands(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_bins(self) -> int:
        return self.matrix.shape[1]


@dataclass
class ErbBands:
    frames: np.ndarray


def _band_centers(num_bands: int, num_bins: int, sample_rate: int) -> np.ndarray:
    # The lowest bands sit one per FFT bin until ERB-rate spacing becomes wider
    # than a bin; the rest are equally spaced on the ERB-rate scale up to Nyquist.
    nyquist = sample_rate / 2.0
    bin_hz = nyquist / (num_bins - 1)
    top = erb_rate(nyquist)
    for linear in range(1, num_bands):
        start = (linear - 1) * bin_hz
        steps = np.arange(1, num_bands - linear + 1)
        upper = erb_rate_to_hz(erb_rate(start) + steps * (top - erb_rate(start)) / steps[-1])
        if upper[0] - start >= bin_hz:
            upper[-1] = nyquist
            return np.concatenate([np.arange(linear) * bin_hz, upper])
    return np.linspace(0.0, nyquist, num_bands)


@lru_cache(maxsize=8)
def build_erb_bank(
    num_bands: int = 128, num_bins: int = 769, sample_rate: int = 48000
) -> ErbFilterBank:
    """
    Build a row-normalised triangular ERB filter bank.

    Args:
        num_bands: Number of output bands
        num_bins: Number of linear STFT bins (fft_size / 2 + 1)
        sample_rate: Sampling rate in Hz

    Returns:
        ErbFilterBank with read-only arrays
    """
    if not 1 < num_bands < num_bins:
        raise ValueError(f"need 1 < num_bands < num_bins, got {num_bands} and {num_bins}")

    centers = _band_centers(num_bands, num_bins, sample_rate)
    # extrapolated neighbours close the first and last triangles
    edges = np.concatenate(
        [[2 * centers[0] - centers[1]], centers, [2 * centers[-1] - centers[-2]]]
    )
    freqs = np.linspace(0.0, sample_rate / 2.0, num_bins)

    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - lo) / (mid - lo)
    falling = (hi - freqs) / (hi - mid)
    matrix = np.clip(np.minimum(rising, falling), 0.0, None)
    matrix /= matrix.sum(axis=1, keepdims=True)

    matrix.setflags(write=False)
    centers.setflags(write=False)
    logger.debug(
        "built ERB bank %dx%d, %.1f..%.1f Hz", num_bands, num_bins, centers[0], centers[-1]
    )
    return ErbFilterBank(matrix, centers)


def erb_analyze(mag: MagnitudeSpectrogram | np.ndarray, bank: ErbFilterBank) -> ErbBands:
    """Per frame, bands = matrix @ magnitude."""
    frames = mag.frames if isinstance(mag, MagnitudeSpectrogram) else np.asarray(mag)
    if frames.shape[-1] != bank.num_bins:
        raise ShapeMismatchError(
            f"magnitude has {frames.shape[-1]} bins, ERB bank expects {bank.num_bins}"
        )
    return ErbBands(frames @ bank.matrix.T)


def export_erb_bank(bank: ErbFilterBank, path: str | Path) -> None:
    """Write the bank as a plain-text matrix, band centres in the header."""
    header = "ERB bank {}x{}; centres (Hz): {}".format(
        bank.num_bands, bank.num_bins, " ".join(f"{c:.3f}" for c in bank.band_centers)
    )
    try:
        np.savetxt(path, bank.matrix, fmt="%.10e", header=header)
    except OSError as exc:
        raise AudioIOError(f"cannot write ERB bank to {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Flipped phase
# ---------------------------------------------------------------------------


def flip_phase(phase: np.ndarray, base_bins: int = 128) -> np.ndarray:
    """
    Extend a trusted low-band phase over the full band by mirror-and-negate.

    Bins 0..base_bins are copied unchanged. Each following segment of
    base_bins bins is the previous segment reversed and negated, so a constant
    low band yields alternating signs. Works on one frame or a (T, F) array.

    Args:
        phase: Phase frame(s) with F bins on the last axis
        base_bins: Width of the trusted band, must divide F - 1

    Returns:
        Extended phase, wrapped to (-pi, pi]
    """
    phase = np.asarray(phase)
    num_bins = phase.shape[-1]
    if base_bins <= 0 or (num_bins - 1) % base_bins:
        raise ShapeMismatchError(
            f"base_bins={base_bins} does not divide the {num_bins - 1} bins above DC"
        )
    out = phase.copy()
    B = base_bins
    for m in range(1, (num_bins - 1) // B):
        out[..., m * B + 1 : (m + 1) * B + 1] = -out[..., (m - 1) * B + 1 : m * B + 1][..., ::-1]
    out[..., B + 1 :] = wrap_phase(out[..., B + 1 :]).astype(out.dtype, copy=False)
    return out
