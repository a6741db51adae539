"""Shared builders for tests."""

import numpy as np

from app.core.schemas import ModelConfig
from app.core.types import Waveform


def tiny_config(variant: str = "full", **overrides) -> ModelConfig:
    """A 32-point topology with every structural feature of the default one."""
    fields = dict(
        variant=variant,
        fft_size=32,
        hop_size=16,
        bins=17,
        erb_bands=8,
        base_bins=4,
        mi_down_channels=[8, 8, 4, 4],
        mi_up_channels=[4, 8, 8, 17],
        mi_gru_groups=2,
        pr_proj_channels=8,
        pr_proj_groups=2,
        pr_down_channels=[8, 8, 8, 4, 4],
        pr_down_groups=[2, 2, 2, 1, 1],
        pr_gru_groups=2,
        pr_up_channels=[8, 8, 8],
        pr_up_groups=[1, 1, 1],
    )
    fields.update(overrides)
    return ModelConfig(**fields)


def noise(seconds: float, seed: int = 0, scale: float = 0.1, sample_rate: int = 48000) -> Waveform:
    rng = np.random.default_rng(seed)
    return Waveform(rng.normal(0.0, scale, int(round(seconds * sample_rate))), sample_rate)


def sine(freq: float, seconds: float, amplitude: float = 0.5, sample_rate: int = 48000) -> Waveform:
    t = np.arange(int(round(seconds * sample_rate))) / sample_rate
    return Waveform(amplitude * np.sin(2 * np.pi * freq * t), sample_rate)
