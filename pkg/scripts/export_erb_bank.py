#!/usr/bin/env python3
"""Export the ERB filter bank as a plain-text matrix."""

import argparse
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from app.core.schemas import ModelConfig  # noqa: E402
from app.dsp.spectral import build_erb_bank, export_erb_bank  # noqa: E402


def main():
    defaults = ModelConfig()
    parser = argparse.ArgumentParser(description="Write the ERB bank matrix to a text file")
    parser.add_argument("--output", default="erb_bank.txt")
    parser.add_argument("--bands", type=int, default=defaults.erb_bands)
    parser.add_argument("--bins", type=int, default=defaults.bins)
    parser.add_argument("--sample-rate", type=int, default=defaults.sample_rate)
    args = parser.parse_args()

    bank = build_erb_bank(args.bands, args.bins, args.sample_rate)
    export_erb_bank(bank, args.output)
    print(f"Saved {bank.num_bands}x{bank.num_bins} ERB bank to {args.output}")


if __name__ == "__main__":
    main()
