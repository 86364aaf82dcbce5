"""Checkpoint serialization: binary weights plus a JSON sidecar.

The weights file starts with magic ``PSCK``, a uint32 format version,
and a uint64 parameter count (little-endian), followed by that many
little-endian float64 values in the documented layer order (temporal
kernels, temporal biases, spatial kernels, spatial biases, dense
weights, dense biases).  The sidecar at ``<path>.json`` carries the
config, training metadata, and the expected parameter count.
"""
from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from .model import Model, ModelConfig, build_model

_MAGIC = b"PSCK"
_VERSION = 1
_HEADER = struct.Struct("<4sIQ")


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".json")


def save_checkpoint(
    model: Model, path: str | Path, training_meta: dict | None = None
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    flat = model.params_flat()
    payload = _HEADER.pack(_MAGIC, _VERSION, flat.shape[0])
    payload += flat.astype("<f8").tobytes()
    path.write_bytes(payload)
    sidecar = {
        "format_version": _VERSION,
        "config": asdict(model.config),
        "training_meta": dict(training_meta or {}),
        "parameter_count": int(flat.shape[0]),
    }
    with open(sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_checkpoint(path: str | Path) -> Model:
    path = Path(path)
    side = sidecar_path(path)
    if not path.is_file():
        raise DataFormatError(f"checkpoint {path} does not exist")
    if not side.is_file():
        raise DataFormatError(f"checkpoint sidecar {side} does not exist")
    try:
        meta = json.loads(side.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{side.name} is not valid JSON: {exc}") from exc
    for key in ("format_version", "config", "parameter_count"):
        if key not in meta:
            raise DataFormatError(f"{side.name} missing key {key!r}")
    if meta["format_version"] != _VERSION:
        raise DataFormatError(
            f"unsupported checkpoint format version {meta['format_version']}"
        )
    config = ModelConfig(**meta["config"])

    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise DataFormatError(f"{path.name}: truncated header")
    magic, version, count = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise DataFormatError(f"{path.name}: bad magic {magic!r}")
    if version != _VERSION:
        raise DataFormatError(f"{path.name}: unsupported version {version}")
    if count != meta["parameter_count"] or count != config.parameter_count:
        raise DataFormatError(
            f"{path.name}: parameter count {count} disagrees with sidecar "
            f"({meta['parameter_count']}) or config ({config.parameter_count})"
        )
    expected_bytes = _HEADER.size + 8 * count
    if len(raw) != expected_bytes:
        raise DataFormatError(
            f"{path.name}: expected {expected_bytes} bytes, found {len(raw)}"
        )
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    return build_model(config).with_params_flat(flat)


def load_training_meta(path: str | Path) -> dict:
    """The training_meta block from a checkpoint's sidecar."""
    meta = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    return meta.get("training_meta", {})
