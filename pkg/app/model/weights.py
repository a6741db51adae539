"""Validated tensor map and the deterministic test-weight generator."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from app.core.errors import (
    ConfigMismatchError,
    MissingTensorError,
    NonFiniteTensorError,
    TensorShapeError,
    UnexpectedTensorError,
)
from app.core.schemas import ModelConfig, Variant
from app.model.layout import tensor_layout

logger = logging.getLogger(__name__)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@dataclass
class ModelWeights:
    """Named float32 tensors covering exactly the layers a config requires."""

    config: ModelConfig
    tensors: dict[str, np.ndarray]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        expected = dict(tensor_layout(self.config))
        for name in self.tensors:
            if name not in expected:
                raise UnexpectedTensorError(name)
        for name, shape in expected.items():
            if name not in self.tensors:
                raise MissingTensorError(name)
            tensor = self.tensors[name]
            if tensor.shape != shape:
                raise TensorShapeError(name, shape, tensor.shape)
            if not np.all(np.isfinite(tensor)):
                raise NonFiniteTensorError(name)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    @property
    def num_params(self) -> int:
        return sum(t.size for t in self.tensors.values())

    @classmethod
    def zeros(cls, config: ModelConfig) -> "ModelWeights":
        tensors = {name: np.zeros(shape, np.float32) for name, shape in tensor_layout(config)}
        return cls(config, tensors)

    def for_variant(self, variant: Variant) -> "ModelWeights":
        """Restrict a full weight set to lite; lite cannot grow into full."""
        if variant == self.config.variant:
            return self
        if variant == "full":
            raise ConfigMismatchError("lite weights cannot drive the full variant")
        config = self.config.as_variant(variant)
        needed = {name for name, _ in tensor_layout(config)}
        return ModelWeights(config, {k: v for k, v in self.tensors.items() if k in needed})


def splitmix64(counter: np.ndarray, seed: int) -> np.ndarray:
    """SplitMix64 output for the given 0-based counters of a seeded stream."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed % 2**64) + (counter.astype(np.uint64) + np.uint64(1)) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def generate_test_weights(config: ModelConfig, seed: int = 0) -> ModelWeights:
    """
    Deterministic weights uniform in [-0.1, 0.1).

    A single SplitMix64 stream runs over all tensors in layout order; element
    k of the stream maps to ((z >> 40) / 2**24) * 0.2 - 0.1.

    Args:
        config: Model topology
        seed: Stream seed

    Returns:
        ModelWeights for config
    """
    layout = tensor_layout(config)
    total = sum(math.prod(shape) for _, shape in layout)
    z = splitmix64(np.arange(total, dtype=np.uint64), seed)
    values = ((z >> np.uint64(40)).astype(np.float64) / 2.0**24 * 0.2 - 0.1).astype(np.float32)

    tensors, offset = {}, 0
    for name, shape in layout:
        size = math.prod(shape)
        tensors[name] = values[offset : offset + size].reshape(shape)
        offset += size
    logger.info("generated %d test weights for %s variant (seed %d)", total, config.variant, seed)
    return ModelWeights(config, tensors)
