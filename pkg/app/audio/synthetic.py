import numpy as np

from app.core.types import Waveform


def speech_like(
    seconds: float,
    sample_rate: int = 48000,
    seed: int = 0,
    f0_range: tuple[float, float] = (100.0, 220.0),
    noise_level: float = 1e-3,
) -> Waveform:
    """
    Seeded harmonic test signal with a gliding pitch and syllable-rate envelope.

    Harmonics up to Nyquist fall off as 1/k; a small white-noise floor keeps
    the signal full-band.

    Args:
        seconds: Duration
        sample_rate: Sampling rate in Hz
        seed: Random seed
        f0_range: Fundamental frequency range in Hz
        noise_level: Standard deviation of the noise floor

    Returns:
        Waveform peaking near 0.5
    """
    rng = np.random.default_rng(seed)
    n = int(round(seconds * sample_rate))
    t = np.arange(n) / sample_rate

    lo, hi = f0_range
    glide_rate = rng.uniform(0.5, 2.0)
    f0 = lo + (hi - lo) * 0.5 * (1 + np.sin(2 * np.pi * glide_rate * t + rng.uniform(0, 2 * np.pi)))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate

    signal = np.zeros(n)
    for k in range(1, int(sample_rate / 2 / lo) + 1):
        audible = k * f0 < sample_rate / 2
        signal += audible * np.sin(k * phase + rng.uniform(0, 2 * np.pi)) / k

    syllable_rate = rng.uniform(3.0, 5.0)
    envelope = 0.55 + 0.45 * np.sin(2 * np.pi * syllable_rate * t)
    signal = signal * envelope + rng.normal(0.0, noise_level, n)

    peak = np.max(np.abs(signal)) if n else 0.0
    if peak > 0:
        signal *= 0.5 / peak
    return Waveform(signal, sample_rate)
