"""Band-limiting degradation and effective-bandwidth estimation.

Cutoffs are effective bandwidths in Hz (half of the equivalent sampling rate).
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Iterable

import numpy as np
import yaml
from pydantic import ValidationError
from scipy.signal import fftconvolve, firwin, kaiser_beta, welch

from app.core.errors import AudioIOError, InvalidCutoffError, ScheduleError
from app.core.schemas import ScheduleEntry
from app.core.settings import settings
from app.core.types import Waveform

logger = logging.getLogger(__name__)

__all__ = [
    "design_lowpass",
    "estimate_bandwidth",
    "fluctuate",
    "load_schedule",
    "lowpass",
    "normalize_schedule",
    "random_schedule",
    "sample_cutoff",
]

THIRD_OCTAVE = 2.0 ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# Low-pass filtering
# ---------------------------------------------------------------------------


def _check_cutoff(cutoff_hz: float, sample_rate: int) -> None:
    if not 0 < cutoff_hz <= sample_rate / 2:
        raise InvalidCutoffError(
            f"cutoff must be in (0, {sample_rate / 2:g}] Hz, got {cutoff_hz:g}"
        )


@lru_cache(maxsize=64)
def design_lowpass(
    cutoff_hz: float,
    sample_rate: int = settings.SAMPLE_RATE,
    numtaps: int = settings.LOWPASS_TAPS,
    attenuation_db: float = settings.LOWPASS_ATTENUATION_DB,
) -> np.ndarray:
    """
    Linear-phase windowed-sinc FIR low-pass (Kaiser window).

    Args:
        cutoff_hz: -6 dB frequency
        sample_rate: Sampling rate in Hz
        numtaps: Filter length, odd so the group delay is a whole sample count
        attenuation_db: Stop-band attenuation the Kaiser window is sized for

    Returns:
        Read-only tap array
    """
    _check_cutoff(cutoff_hz, sample_rate)
    if numtaps % 2 == 0:
        raise ValueError(f"numtaps must be odd, got {numtaps}")
    window = ("kaiser", kaiser_beta(attenuation_db))
    taps = firwin(numtaps, cutoff_hz, window=window, fs=sample_rate)
    taps.setflags(write=False)
    logger.debug("designed %d-tap low-pass at %.1f Hz", numtaps, cutoff_hz)
    return taps


def lowpass(wave: Waveform, cutoff_hz: float) -> Waveform:
    """
    Band-limit a waveform, delay-compensated so it stays sample-aligned.

    Args:
        wave: Input waveform
        cutoff_hz: Effective bandwidth in (0, Nyquist]; Nyquist returns a copy

    Returns:
        Filtered waveform of the same length
    """
    _check_cutoff(cutoff_hz, wave.sample_rate)
    samples = np.asarray(wave.samples, dtype=np.float64)
    if cutoff_hz >= wave.sample_rate / 2:
        return Waveform(samples.copy(), wave.sample_rate)
    taps = design_lowpass(float(cutoff_hz), wave.sample_rate)
    delay = (len(taps) - 1) // 2
    filtered = fftconvolve(samples, taps, mode="full")[delay : delay + len(samples)]
    return Waveform(filtered, wave.sample_rate)


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------


def normalize_schedule(schedule: Iterable) -> list[ScheduleEntry]:
    entries = []
    try:
        for item in schedule:
            if isinstance(item, ScheduleEntry):
                entries.append(item)
            elif isinstance(item, dict):
                entries.append(ScheduleEntry(**item))
            else:
                start, cutoff = item
                entries.append(ScheduleEntry(start=start, cutoff=cutoff))
    except (ValidationError, TypeError, ValueError) as exc:
        raise ScheduleError(f"invalid schedule entry: {exc}") from exc

    if not entries:
        raise ScheduleError("schedule is empty")
    if entries[0].start != 0:
        raise ScheduleError(
            f"schedule must start at 0 s, first entry starts at {entries[0].start:g} s"
        )
    for prev, cur in zip(entries, entries[1:]):
        if cur.start <= prev.start:
            raise ScheduleError(
                f"schedule is not strictly increasing: {prev.start:g} s then {cur.start:g} s"
            )
    return entries


def fluctuate(
    wave: Waveform,
    schedule: Iterable,
    crossfade_seconds: float = settings.CROSSFADE_SECONDS,
) -> Waveform:
    """
    Piecewise low-pass with linear crossfades at segment boundaries.

    Args:
        wave: Input waveform
        schedule: (start_seconds, cutoff_hz) pairs or ScheduleEntry objects,
            sorted and starting at 0
        crossfade_seconds: Length of the fade that starts at each boundary

    Returns:
        Degraded waveform of the same length
    """
    entries = normalize_schedule(schedule)
    n = len(wave)
    bounds = [int(round(e.start * wave.sample_rate)) for e in entries] + [n]
    if bounds[-2] >= n:
        raise ScheduleError(
            f"schedule entry at {entries[-1].start:g} s starts after the {wave.duration:g} s signal"
        )

    filtered: dict[float, np.ndarray] = {}
    for entry in entries:
        if entry.cutoff not in filtered:
            filtered[entry.cutoff] = lowpass(wave, entry.cutoff).samples

    out = np.empty(n)
    fade = max(1, int(round(crossfade_seconds * wave.sample_rate)))
    for k, entry in enumerate(entries):
        start, stop = bounds[k], bounds[k + 1]
        out[start:stop] = filtered[entry.cutoff][start:stop]
        if k:
            end = min(start + fade, stop)
            ramp = np.arange(end - start) / fade
            previous = filtered[entries[k - 1].cutoff][start:end]
            out[start:end] = (1.0 - ramp) * previous + ramp * out[start:end]
    return Waveform(out, wave.sample_rate)


def load_schedule(path: str | Path) -> list[ScheduleEntry]:
    """
    Read a schedule file.

    Plain text: one "start_seconds cutoff_hz" pair per line, "#" starts a
    comment. Files ending in .yaml/.yml hold a list of {start, cutoff} maps.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise AudioIOError(f"cannot read schedule {path}: {exc}") from exc

    if path.suffix.lower() in (".yaml", ".yml"):
        try:
            items = yaml.safe_load(text) or []
        except yaml.YAMLError as exc:
            raise ScheduleError(f"{path}: invalid YAML: {exc}") from exc
        if isinstance(items, dict):
            items = items.get("schedule", [])
        if not isinstance(items, list):
            raise ScheduleError(f"{path}: expected a list of segments")
        return normalize_schedule(items)

    items = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ScheduleError(f"{path}:{lineno}: expected 'start_seconds cutoff_hz'")
        try:
            items.append((float(fields[0]), float(fields[1])))
        except ValueError as exc:
            raise ScheduleError(f"{path}:{lineno}: {exc}") from exc
    return normalize_schedule(items)


def sample_cutoff(rng: np.random.Generator, low: float = 4000.0, high: float = 24000.0) -> float:
    """Uniform effective bandwidth in [low, high] Hz."""
    if not 0 < low <= high:
        raise InvalidCutoffError(f"invalid cutoff range [{low:g}, {high:g}]")
    return float(rng.uniform(low, high))


def random_schedule(
    duration: float,
    segment_seconds: float,
    rng: np.random.Generator,
    low: float = 4000.0,
    high: float = 24000.0,
) -> list[ScheduleEntry]:
    """Fluctuating schedule with one uniformly drawn cutoff per segment."""
    if duration <= 0 or segment_seconds <= 0:
        raise ScheduleError("duration and segment length must be positive")
    starts = np.arange(0.0, duration, segment_seconds)
    return [ScheduleEntry(start=float(s), cutoff=sample_cutoff(rng, low, high)) for s in starts]


# ---------------------------------------------------------------------------
# Bandwidth estimation
# ---------------------------------------------------------------------------


def estimate_bandwidth(
    wave: Waveform, threshold_db: float = settings.BANDWIDTH_THRESHOLD_DB
) -> float:
    """
    Highest frequency whose smoothed level is within threshold_db of the peak.

    Each PSD bin is smoothed over the third octave above it, so energy below a
    band edge never raises levels above that edge.

    Args:
        wave: Input waveform
        threshold_db: Allowed drop below the peak smoothed level

    Returns:
        Effective bandwidth in Hz, 0.0 for silence
    """
    samples = np.asarray(wave.samples, dtype=np.float64)
    if len(samples) == 0 or not np.any(samples):
        return 0.0
    freqs, psd = welch(samples, fs=wave.sample_rate, window="hann", nperseg=min(4096, len(samples)))
    if not np.any(psd > 0):
        return 0.0

    cumulative = np.concatenate([[0.0], np.cumsum(psd)])
    upper = np.searchsorted(freqs, freqs * THIRD_OCTAVE, side="right")
    lower = np.arange(len(freqs))
    smoothed = (cumulative[upper] - cumulative[lower]) / (upper - lower)

    level = 10.0 * np.log10(np.maximum(smoothed, 1e-300))
    above = np.nonzero(level >= level.max() - threshold_db)[0]
    return float(freqs[above[-1]])
