"""Binary weight file ("BAEW") reader and writer.

Layout, all integers little-endian:

    magic        4 bytes  b"BAEW"
    version      u32      1
    variant      u32      0 = full, 1 = lite
    config_len   u32
    config       config_len bytes of UTF-8 JSON (ModelConfig)
    count        u32
    count x tensor:
        name_len u16, name (UTF-8)
        dtype    u8 (1 = float32)
        rank     u8, then rank x u32 dims
        data     prod(dims) x float32
"""

import json
import logging
import math
import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.core.errors import (
    AudioIOError,
    BadMagicError,
    ConfigMismatchError,
    DuplicateTensorError,
    TruncatedFileError,
    UnsupportedVersionError,
    WeightFileError,
)
from app.core.schemas import ModelConfig
from app.model.weights import ModelWeights

logger = logging.getLogger(__name__)

MAGIC = b"BAEW"
FORMAT_VERSION = 1
DTYPE_F32 = 1
VARIANT_CODES = {"full": 0, "lite": 1}


def encode(weights: ModelWeights) -> bytes:
    config = weights.config
    config_json = config.model_dump_json().encode("utf-8")
    parts = [
        MAGIC,
        struct.pack("<III", FORMAT_VERSION, VARIANT_CODES[config.variant], len(config_json)),
        config_json,
        struct.pack("<I", len(weights.tensors)),
    ]
    for name, tensor in weights.tensors.items():
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<BB", DTYPE_F32, tensor.ndim))
        parts.append(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
        parts.append(np.ascontiguousarray(tensor, dtype="<f4").tobytes())
    return b"".join(parts)


def save(weights: ModelWeights, path: str | Path) -> None:
    """Write weights to path."""
    payload = encode(weights)
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise AudioIOError(f"cannot write weights to {path}: {exc}") from exc
    logger.info("saved %d tensors (%d bytes) to %s", len(weights.tensors), len(payload), path)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise TruncatedFileError(
                f"file ends at byte {len(self.data)} while reading {what} "
                f"({size} bytes at {self.offset})"
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode(data: bytes) -> ModelWeights:
    """
    Parse and validate a weight file image.

    Args:
        data: File contents

    Returns:
        Validated ModelWeights
    """
    reader = _Reader(data)
    magic = reader.take(4, "magic")
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version, variant_code, config_len = reader.unpack("<III", "header")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"format version {version}, this build reads {FORMAT_VERSION}"
        )

    raw_config = reader.take(config_len, "config block")
    try:
        config = ModelConfig.model_validate(json.loads(raw_config.decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError, ValidationError) as exc:
        raise ConfigMismatchError(f"invalid config block: {exc}") from exc
    if VARIANT_CODES.get(config.variant) != variant_code:
        raise ConfigMismatchError(
            f"header variant code {variant_code} disagrees with config variant '{config.variant}'"
        )

    (count,) = reader.unpack("<I", "tensor count")
    tensors: dict[str, np.ndarray] = {}
    for index in range(count):
        (name_len,) = reader.unpack("<H", f"name length of tensor {index}")
        try:
            name = reader.take(name_len, f"name of tensor {index}").decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WeightFileError(f"tensor {index} name is not UTF-8") from exc
        dtype, rank = reader.unpack("<BB", f"dtype of '{name}'")
        if dtype != DTYPE_F32:
            raise WeightFileError(f"tensor '{name}' has unsupported dtype code {dtype}")
        dims = reader.unpack(f"<{rank}I", f"dims of '{name}'")
        raw = reader.take(4 * math.prod(dims), f"data of '{name}'")
        if name in tensors:
            raise DuplicateTensorError(name)
        tensors[name] = np.frombuffer(raw, dtype="<f4").astype(np.float32).reshape(dims)

    if reader.offset != len(data):
        raise WeightFileError(f"{len(data) - reader.offset} trailing bytes after last tensor")
    return ModelWeights(config, tensors)


def load(path: str | Path) -> ModelWeights:
    """Read and validate a weight file."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise AudioIOError(f"cannot read weights from {path}: {exc}") from exc
    weights = decode(data)
    logger.info(
        "loaded %s weights from %s: %d tensors, %d params",
        weights.config.variant,
        path,
        len(weights.tensors),
        weights.num_params,
    )
    return weights
