#!/usr/bin/env python3
"""
Synthetic audio generator for bandwidth-extension experiments.

Writes seeded speech-like clips, their band-limited versions (fixed cutoff or a
random fluctuating schedule) and a CSV manifest describing each pair.
"""

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

# Add the app directory to the path
sys.path.append(str(Path(__file__).parent.parent))

from app.audio.io import FLOAT, write_wav  # noqa: E402
from app.audio.synthetic import speech_like  # noqa: E402
from app.core.settings import settings  # noqa: E402
from app.dsp.bandwidth import (  # noqa: E402
    estimate_bandwidth,
    fluctuate,
    lowpass,
    random_schedule,
    sample_cutoff,
)


def generate_clips(
    count: int, seconds: float, outdir: Path, fluctuating: bool, seed: int | None
) -> list[dict]:
    """Generate clean/degraded pairs and return one manifest row per pair."""
    rng = np.random.default_rng(seed)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for index in range(count):
        clip_seed = int(rng.integers(0, 2**31))
        clean = speech_like(seconds, settings.SAMPLE_RATE, clip_seed)

        if fluctuating:
            schedule = random_schedule(seconds, seconds / 4, rng)
            degraded = fluctuate(clean, schedule)
            cutoffs = ";".join(f"{e.start:g}:{e.cutoff:.0f}" for e in schedule)
        else:
            cutoff = sample_cutoff(rng)
            degraded = lowpass(clean, cutoff)
            cutoffs = f"0:{cutoff:.0f}"

        clean_path = outdir / f"clip{index:03d}_clean.wav"
        degraded_path = outdir / f"clip{index:03d}_degraded.wav"
        write_wav(clean_path, clean, FLOAT)
        write_wav(degraded_path, degraded, FLOAT)

        rows.append(
            {
                "clip": index,
                "seed": clip_seed,
                "clean": clean_path.name,
                "degraded": degraded_path.name,
                "schedule": cutoffs,
                "estimated_bandwidth_hz": estimate_bandwidth(degraded),
            }
        )
    return rows


def main():
    """Main function for synthetic audio generation."""
    parser = argparse.ArgumentParser(description="Generate band-limited speech-like test audio")
    parser.add_argument("--count", type=int, default=10, help="Number of clips (default: 10)")
    parser.add_argument("--seconds", type=float, default=4.0, help="Clip length (default: 4 s)")
    parser.add_argument("--outdir", type=str, default="data/synthetic", help="Output directory")
    parser.add_argument(
        "--fluctuating", action="store_true", help="Use a random per-quarter cutoff schedule"
    )
    parser.add_argument("--seed", type=int, default=None, help="Random seed for reproducible audio")

    args = parser.parse_args()

    print(f"Generating {args.count} clips of {args.seconds:g} s...")
    outdir = Path(args.outdir)
    rows = generate_clips(args.count, args.seconds, outdir, args.fluctuating, args.seed)

    manifest = pd.DataFrame(rows)
    manifest.to_csv(outdir / "manifest.csv", index=False)
    print(f"Saved {len(rows)} clip pairs and manifest.csv to {outdir}")
    print(manifest[["clip", "schedule", "estimated_bandwidth_hz"]].to_string(index=False))


if __name__ == "__main__":
    main()
