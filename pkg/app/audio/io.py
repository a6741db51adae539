import logging
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from app.core.errors import AudioFormatError, AudioIOError
from app.core.settings import settings
from app.core.types import Waveform

logger = logging.getLogger(__name__)

PCM_16 = "PCM_16"
FLOAT = "FLOAT"


def read_wav(path: str | Path, sample_rate: int = settings.SAMPLE_RATE) -> tuple[Waveform, str]:
    """
    Read a mono 16-bit PCM or 32-bit float WAV file.

    Args:
        path: WAV file path
        sample_rate: Required sampling rate

    Returns:
        (waveform in float64, subtype to write results back with)
    """
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError as exc:
        raise AudioIOError(f"cannot open {path}: no such file") from exc
    except OSError as exc:
        raise AudioIOError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise AudioFormatError(f"{path} is not a readable WAV file: {exc}") from exc

    if data.ndim != 1:
        raise AudioFormatError(f"{path} has {data.shape[1]} channels, only mono is supported")
    if rate != sample_rate:
        raise AudioFormatError(f"{path} is sampled at {rate} Hz, expected {sample_rate} Hz")

    if data.dtype == np.int16:
        samples, subtype = data / 32768.0, PCM_16
    elif data.dtype == np.float32:
        samples, subtype = data.astype(np.float64), FLOAT
    else:
        raise AudioFormatError(
            f"{path} has sample type {data.dtype}; only 16-bit PCM and 32-bit float are supported"
        )

    if not np.all(np.isfinite(samples)):
        raise AudioFormatError(f"{path} contains NaN or Inf samples")
    logger.debug("read %s: %d samples, %s", path, len(samples), subtype)
    return Waveform(samples.astype(np.float64), rate), subtype


def write_wav(path: str | Path, wave: Waveform, subtype: str = PCM_16) -> None:
    """Write a mono WAV file as 16-bit PCM or 32-bit float."""
    if subtype == PCM_16:
        data = np.round(np.clip(wave.samples, -1.0, 32767 / 32768) * 32768).astype(np.int16)
    elif subtype == FLOAT:
        data = wave.samples.astype(np.float32)
    else:
        raise AudioFormatError(f"unsupported output subtype {subtype}")
    try:
        wavfile.write(path, wave.sample_rate, data)
    except OSError as exc:
        raise AudioIOError(f"cannot write {path}: {exc}") from exc
    logger.debug("wrote %s: %d samples, %s", path, len(data), subtype)


def read_raw(data: bytes) -> np.ndarray:
    """Headerless little-endian float32 PCM to float64 samples."""
    return np.frombuffer(data, dtype="<f4").astype(np.float64)


def to_raw(samples: np.ndarray) -> bytes:
    return np.asarray(samples, dtype="<f4").tobytes()
