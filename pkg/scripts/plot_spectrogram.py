#!/usr/bin/env python3
"""Render reference / degraded / extended spectrograms side by side."""

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

sys.path.append(str(Path(__file__).parent.parent))

from app.audio.io import read_wav  # noqa: E402
from app.core.settings import settings  # noqa: E402
from app.dsp.stft import stft  # noqa: E402


def log_spectrogram(path: str) -> np.ndarray:
    wave, _ = read_wav(path)
    spec = stft(wave, settings.FFT_SIZE, settings.HOP_SIZE)
    return 20 * np.log10(np.abs(spec.frames).T + 1e-8)


def main():
    parser = argparse.ArgumentParser(description="Plot spectrograms of one or more WAV files")
    parser.add_argument("inputs", nargs="+", help="WAV files, plotted left to right")
    parser.add_argument("--output", default="spectrogram.png", help="Image path")
    parser.add_argument("--floor-db", type=float, default=-100.0, help="Colour scale floor")
    args = parser.parse_args()

    fig, axes = plt.subplots(1, len(args.inputs), figsize=(5 * len(args.inputs), 4), squeeze=False)
    nyquist_khz = settings.SAMPLE_RATE / 2000
    for ax, path in zip(axes[0], args.inputs):
        image = log_spectrogram(path)
        seconds = image.shape[1] * settings.HOP_SIZE / settings.SAMPLE_RATE
        ax.imshow(
            image,
            origin="lower",
            aspect="auto",
            extent=(0, seconds, 0, nyquist_khz),
            vmin=args.floor_db,
            vmax=image.max(),
            cmap="magma",
        )
        ax.set_title(Path(path).name)
        ax.set_xlabel("time (s)")
        ax.set_ylabel("frequency (kHz)")

    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(f"Saved {args.output}")


if __name__ == "__main__":
    main()
