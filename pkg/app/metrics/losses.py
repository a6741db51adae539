"""Generator training-objective terms as plain evaluable functions."""

from typing import Sequence

import numpy as np

from app.core.errors import InvalidSignalError, ShapeMismatchError
from app.core.schemas import LossWeights, MultiResConfig
from app.core.types import Waveform
from app.metrics.quality import check_pair, stft_magnitude

MRSTFT_EPS = 1e-7


def wav_loss(ref: Waveform | np.ndarray, deg: Waveform | np.ndarray) -> float:
    """Mean absolute sample difference."""
    a, b = check_pair(ref, deg)
    return float(np.mean(np.abs(a - b)))


def spectral_convergence(mag_ref: np.ndarray, mag_deg: np.ndarray) -> float:
    """||S - S_hat||_F / ||S||_F; a silent reference divides by 1."""
    norm = np.linalg.norm(mag_ref)
    return float(np.linalg.norm(mag_ref - mag_deg) / (norm if norm > 0 else 1.0))


def log_magnitude_l1(mag_ref: np.ndarray, mag_deg: np.ndarray) -> float:
    return float(np.mean(np.abs(np.log(mag_ref + MRSTFT_EPS) - np.log(mag_deg + MRSTFT_EPS))))


def mrstft_loss(
    ref: Waveform | np.ndarray, deg: Waveform | np.ndarray, cfg: MultiResConfig | None = None
) -> float:
    """
    Multi-resolution STFT loss.

    Sum over resolutions of spectral convergence plus the mean absolute
    natural-log magnitude difference.

    Args:
        ref: Target signal
        deg: Generated signal of the same length
        cfg: Resolutions, defaults to 512/1024/2048

    Returns:
        Loss value (0 for identical signals)
    """
    cfg = cfg or MultiResConfig()
    a, b = check_pair(ref, deg)
    total = 0.0
    for fft_size, hop, win in zip(cfg.fft_sizes, cfg.hops, cfg.win_lengths):
        mag_ref = stft_magnitude(a, fft_size, hop, win)
        mag_deg = stft_magnitude(b, fft_size, hop, win)
        total += spectral_convergence(mag_ref, mag_deg) + log_magnitude_l1(mag_ref, mag_deg)
    return total


def _pool(scores: Sequence, what: str) -> np.ndarray:
    if len(scores) == 0:
        raise InvalidSignalError(f"{what} score list is empty")
    pooled = np.concatenate([np.asarray(s, dtype=np.float64).reshape(-1) for s in scores])
    if pooled.size == 0:
        raise InvalidSignalError(f"{what} score list holds no values")
    return pooled


def adv_loss_d(scores_real: Sequence, scores_fake: Sequence) -> float:
    """Discriminator loss E[(D(s) - 1)^2] + E[(D(s~) + 1)^2] over pooled scores."""
    real, fake = _pool(scores_real, "real"), _pool(scores_fake, "fake")
    return float(np.mean((real - 1.0) ** 2) + np.mean((fake + 1.0) ** 2))


def adv_loss_g(scores_fake: Sequence, scores_real: Sequence) -> float:
    """Generator loss E[(D(s~) - 1)^2] + E[(D(s) + 1)^2]."""
    fake, real = _pool(scores_fake, "fake"), _pool(scores_real, "real")
    return float(np.mean((fake - 1.0) ** 2) + np.mean((real + 1.0) ** 2))


def feat_match_loss(feat_real: Sequence, feat_fake: Sequence) -> float:
    """Mean over layers of the mean absolute feature-map difference."""
    if len(feat_real) == 0:
        raise InvalidSignalError("feature map list is empty")
    if len(feat_real) != len(feat_fake):
        raise ShapeMismatchError(f"{len(feat_real)} real vs {len(feat_fake)} fake feature maps")
    per_layer = []
    for index, (real, fake) in enumerate(zip(feat_real, feat_fake)):
        real, fake = np.asarray(real, dtype=np.float64), np.asarray(fake, dtype=np.float64)
        if real.shape != fake.shape:
            raise ShapeMismatchError(f"feature map {index}: {real.shape} vs {fake.shape}")
        per_layer.append(np.mean(np.abs(real - fake)))
    return float(np.mean(per_layer))


def total_generator_loss(
    wav: float, mrstft: float, adv_g: float, feat: float, weights: LossWeights | None = None
) -> float:
    """lambda_wav * wav + lambda_stft * mrstft + adv_g + lambda_feat * feat."""
    weights = weights or LossWeights()
    return (
        weights.lambda_wav * wav
        + weights.lambda_stft * mrstft
        + adv_g
        + weights.lambda_feat * feat
    )
