import logging

import pandas as pd

from app.core.schemas import ComplexityReport, ModelConfig
from app.model.layout import FixedSpec, LayerSpec, build_layer_specs

logger = logging.getLogger(__name__)


def count_layers(specs: list[LayerSpec], frame_rate: float = 62.5) -> tuple[int, int, float]:
    """
    Sum parameters and multiply-accumulates over a list of layer specs.

    Args:
        specs: Layer specs
        frame_rate: Frames per second

    Returns:
        (params, MACs per frame, MACs per second)
    """
    params = sum(spec.params for spec in specs)
    macs = sum(spec.macs for spec in specs)
    return params, macs, macs * frame_rate


def count_complexity(config: ModelConfig) -> ComplexityReport:
    """Analytical complexity of a configured network."""
    params, macs, macs_per_second = count_layers(build_layer_specs(config), config.frame_rate)
    logger.debug("%s: %d params, %d MACs/frame", config.variant, params, macs)
    return ComplexityReport(
        variant=config.variant,
        params=params,
        macs_per_frame=macs,
        frame_rate=config.frame_rate,
        macs_per_second=macs_per_second,
    )


def learned_complexity(config: ModelConfig) -> ComplexityReport:
    """Complexity of the parameterised layers alone, without analysis, ERB and synthesis."""
    specs = [spec for spec in build_layer_specs(config) if not isinstance(spec, FixedSpec)]
    params, macs, macs_per_second = count_layers(specs, config.frame_rate)
    return ComplexityReport(
        variant=config.variant,
        params=params,
        macs_per_frame=macs,
        frame_rate=config.frame_rate,
        macs_per_second=macs_per_second,
    )


def layer_table(config: ModelConfig) -> pd.DataFrame:
    """Per-layer breakdown with one row per spec."""
    rows = [
        {
            "layer": spec.name,
            "kind": type(spec).__name__.removesuffix("Spec").lower(),
            "params": spec.params,
            "macs_per_frame": spec.macs,
        }
        for spec in build_layer_specs(config)
    ]
    df = pd.DataFrame(rows)
    df["macs_per_second"] = df["macs_per_frame"] * config.frame_rate
    return df
