import numpy as np

from app.core.errors import InvalidSignalError, ShapeMismatchError
from app.core.types import Waveform
from app.dsp.stft import hann_window

LSD_FFT = 2048
LSD_HOP = 512
LSD_EPS = 1e-10

SEGSNR_SEGMENT = 1536
SEGSNR_MIN_DB = -10.0
SEGSNR_MAX_DB = 35.0
SEGSNR_SILENCE = 1e-8


def _samples(x: Waveform | np.ndarray) -> np.ndarray:
    return np.asarray(x.samples if isinstance(x, Waveform) else x, dtype=np.float64)


def check_pair(
    ref: Waveform | np.ndarray, deg: Waveform | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return both signals as float64 arrays after checking rate and length."""
    both_waves = isinstance(ref, Waveform) and isinstance(deg, Waveform)
    if both_waves and ref.sample_rate != deg.sample_rate:
        raise ShapeMismatchError(f"sample rates differ: {ref.sample_rate} vs {deg.sample_rate}")
    a, b = _samples(ref), _samples(deg)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"signal lengths differ: {a.shape} vs {b.shape}")
    return a, b


def stft_magnitude(
    samples: np.ndarray, fft_size: int, hop: int, win_length: int | None = None
) -> np.ndarray:
    """
    Magnitude STFT over complete frames.

    A periodic Hann window of win_length is zero-padded and centred to
    fft_size. Signals shorter than one frame are zero-padded to one frame.

    Returns:
        (frames, fft_size / 2 + 1) magnitudes
    """
    win_length = win_length or fft_size
    window = np.zeros(fft_size)
    offset = (fft_size - win_length) // 2
    window[offset : offset + win_length] = hann_window(win_length)

    if len(samples) < fft_size:
        samples = np.pad(samples, (0, fft_size - len(samples)))
    frames = np.lib.stride_tricks.sliding_window_view(samples, fft_size)[::hop]
    return np.abs(np.fft.rfft(frames * window, axis=-1))


def lsd(ref: Waveform | np.ndarray, deg: Waveform | np.ndarray) -> float:
    """
    Log-spectral distance.

    Per frame sqrt(mean over bins of (log10 P_ref - log10 P_deg)^2), averaged
    over frames, with a 2048-point Hann STFT at hop 512 and P = |S|^2 + 1e-10.
    Frames that are silent in both signals are skipped.

    Args:
        ref: Reference signal
        deg: Degraded or processed signal of the same length

    Returns:
        LSD (0 for identical signals)
    """
    a, b = check_pair(ref, deg)
    power_ref = stft_magnitude(a, LSD_FFT, LSD_HOP) ** 2
    power_deg = stft_magnitude(b, LSD_FFT, LSD_HOP) ** 2
    live = np.any(power_ref > 0, axis=-1) | np.any(power_deg > 0, axis=-1)
    if not np.any(live):
        return 0.0
    diff = np.log10(power_ref[live] + LSD_EPS) - np.log10(power_deg[live] + LSD_EPS)
    return float(np.mean(np.sqrt(np.mean(diff**2, axis=-1))))


def segment_snrs(ref: Waveform | np.ndarray, deg: Waveform | np.ndarray) -> np.ndarray:
    """Clipped SNR of every non-silent 32 ms segment."""
    a, b = check_pair(ref, deg)
    n_segments = len(a) // SEGSNR_SEGMENT
    if n_segments == 0:
        raise InvalidSignalError(f"signal shorter than one {SEGSNR_SEGMENT}-sample segment")
    a = a[: n_segments * SEGSNR_SEGMENT].reshape(n_segments, -1)
    b = b[: n_segments * SEGSNR_SEGMENT].reshape(n_segments, -1)

    signal = np.sum(a**2, axis=1)
    noise = np.sum((a - b) ** 2, axis=1)
    keep = signal >= SEGSNR_SILENCE
    signal, noise = signal[keep], noise[keep]
    with np.errstate(divide="ignore"):
        snr = 10.0 * np.log10(signal / noise)
    return np.clip(snr, SEGSNR_MIN_DB, SEGSNR_MAX_DB)


def segsnr(ref: Waveform | np.ndarray, deg: Waveform | np.ndarray) -> float:
    """
    Segmental SNR in dB over non-overlapping 1536-sample segments.

    Segments whose reference energy is below 1e-8 are skipped; each segment's
    SNR is clipped to [-10, 35] dB before averaging.
    """
    snrs = segment_snrs(ref, deg)
    if len(snrs) == 0:
        raise InvalidSignalError("reference is silent in every segment")
    return float(np.mean(snrs))
