import json
import logging
from typing import Callable, Iterable

import numpy as np
import pandas as pd

from app.core.errors import UsageError
from app.core.schemas import MultiResConfig
from app.core.settings import settings
from app.core.types import Waveform
from app.dsp.bandwidth import estimate_bandwidth, lowpass, normalize_schedule
from app.metrics.losses import mrstft_loss, wav_loss
from app.metrics.quality import check_pair, lsd, segsnr

logger = logging.getLogger(__name__)

METRICS: dict[str, Callable[[Waveform, Waveform], float]] = {
    "lsd": lsd,
    "segsnr": segsnr,
    "mrstft": lambda ref, deg: mrstft_loss(ref, deg, MultiResConfig()),
    "wav": wav_loss,
}


def parse_metrics(names: str | Iterable[str] | None) -> list[str]:
    if names is None:
        names = settings.EVAL_METRICS
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    names = list(names)
    unknown = [n for n in names if n not in METRICS]
    if unknown or not names:
        raise UsageError(
            f"unknown metric(s) {', '.join(unknown) or '(none given)'}; "
            f"choose from {', '.join(METRICS)}"
        )
    return names


def evaluate_pair(
    reference: Waveform, degraded: Waveform, metrics: str | Iterable[str] | None = None
) -> dict[str, float]:
    """
    Compute the selected metrics for one reference/degraded pair.

    Args:
        reference: Clean reference
        degraded: Signal under test, same length and rate
        metrics: Metric names (comma string or list), defaults to settings.EVAL_METRICS

    Returns:
        Mapping of metric name to value, in the requested order
    """
    names = parse_metrics(metrics)
    check_pair(reference, degraded)
    return {name: METRICS[name](reference, degraded) for name in names}


def bandwidth_sweep(model, clean: Waveform, cutoffs: Iterable[float]) -> pd.DataFrame:
    """
    Degrade a clean signal at each cutoff, extend it and score both versions.

    Args:
        model: Object with process(Waveform) -> Waveform (a BaeNet)
        clean: Full-band reference
        cutoffs: Effective bandwidths in Hz

    Returns:
        DataFrame with one row per cutoff
    """
    rows = []
    for cutoff in cutoffs:
        degraded = lowpass(clean, cutoff)
        extended = model.process(degraded)
        rows.append(
            {
                "cutoff_hz": float(cutoff),
                "input_bandwidth_hz": estimate_bandwidth(degraded),
                "output_bandwidth_hz": estimate_bandwidth(extended),
                "input_lsd": lsd(clean, degraded),
                "output_lsd": lsd(clean, extended),
                "input_segsnr": segsnr(clean, degraded),
                "output_segsnr": segsnr(clean, extended),
            }
        )
        row = rows[-1]
        logger.info("sweep %.0f Hz: LSD %.3f -> %.3f", cutoff, row["input_lsd"], row["output_lsd"])
    return pd.DataFrame(rows)


def segment_report(reference: Waveform, processed: Waveform, schedule: Iterable) -> pd.DataFrame:
    """
    Score a processed signal separately over each schedule segment.

    Args:
        reference: Clean reference
        processed: Degraded or extended signal of the same length
        schedule: Bandwidth schedule the signal was degraded with

    Returns:
        DataFrame with one row per segment
    """
    a, b = check_pair(reference, processed)
    entries = normalize_schedule(schedule)
    rate = reference.sample_rate
    bounds = [int(round(e.start * rate)) for e in entries] + [len(a)]
    rows = []
    for entry, start, stop in zip(entries, bounds[:-1], bounds[1:]):
        ref_seg, proc_seg = a[start:stop], b[start:stop]
        rows.append(
            {
                "start_s": start / rate,
                "end_s": stop / rate,
                "cutoff_hz": entry.cutoff,
                "estimated_bandwidth_hz": estimate_bandwidth(Waveform(proc_seg, rate)),
                "lsd": lsd(ref_seg, proc_seg),
                "segsnr": segsnr(ref_seg, proc_seg) if len(ref_seg) >= 1536 else np.nan,
            }
        )
    return pd.DataFrame(rows)


def format_report(results: dict, fmt: str = settings.EVAL_OUTPUT_FORMAT) -> str:
    """Render results as key=value lines ("text") or a JSON object ("json")."""
    if fmt == "json":
        return json.dumps(results, indent=2)
    if fmt != "text":
        raise UsageError(f"unknown output format '{fmt}', expected text or json")
    lines = []
    for key, value in results.items():
        lines.append(f"{key}={value:.6f}" if isinstance(value, float) else f"{key}={value}")
    return "\n".join(lines)
