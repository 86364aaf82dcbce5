"""Core dataset containers and on-disk trial storage.

A dataset directory holds one ``manifest.json`` plus one binary file per
trial.  Trial files carry a 16-byte header (magic ``EEGT``, uint32
channel count, uint32 sample count, uint32 reserved zero, little-endian)
followed by channels x samples float32 samples in row-major order.
In-memory arrays are float64; values are quantized through float32 on
write, so a load after a save reproduces the saved arrays bit-exactly.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataFormatError

_TRIAL_MAGIC = b"EEGT"
_TRIAL_HEADER = struct.Struct("<4sIII")
_F32_MAX = float(np.finfo(np.float32).max)


@dataclass(frozen=True)
class EegTrial:
    """One recorded trial: a (channels, samples) array plus identity."""

    data: np.ndarray
    label: int
    subject_id: int
    trial_id: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ConfigError(f"trial data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ConfigError(f"trial data must be non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError(
                f"trial {self.trial_id} (subject {self.subject_id}) contains "
                f"non-finite samples"
            )
        if self.label < 0:
            raise ConfigError(f"trial label must be >= 0, got {self.label}")
        object.__setattr__(self, "data", arr)

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class EegDataset:
    """A set of trials sharing a sampling rate and channel montage."""

    fs: float
    channel_labels: tuple[str, ...]
    class_names: tuple[str, ...]
    trials: tuple[EegTrial, ...]

    def __post_init__(self) -> None:
        if self.fs <= 0:
            raise ConfigError(f"sampling rate must be positive, got {self.fs}")
        if len(set(self.channel_labels)) != len(self.channel_labels):
            raise ConfigError("channel labels must be unique")
        if len(self.class_names) < 2:
            raise ConfigError("a dataset needs at least two class names")
        object.__setattr__(self, "channel_labels", tuple(self.channel_labels))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "trials", tuple(self.trials))
        n_ch = len(self.channel_labels)
        for t in self.trials:
            if t.n_channels != n_ch:
                raise ConfigError(
                    f"trial {t.trial_id} has {t.n_channels} channels, "
                    f"montage has {n_ch}"
                )
            if t.label >= len(self.class_names):
                raise ConfigError(
                    f"trial {t.trial_id} label {t.label} out of range for "
                    f"{len(self.class_names)} classes"
                )

    @property
    def n_channels(self) -> int:
        return len(self.channel_labels)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def subject_ids(self) -> tuple[int, ...]:
        return tuple(sorted({t.subject_id for t in self.trials}))

    def for_subject(self, subject_id: int) -> "EegDataset":
        """Restrict to one subject's trials (original order preserved)."""
        kept = tuple(t for t in self.trials if t.subject_id == subject_id)
        if not kept:
            raise ConfigError(f"no trials for subject {subject_id}")
        return replace(self, trials=kept)

    def restrict_channels(self, channel_indices: list[int]) -> "EegDataset":
        """Keep a subset of channels, given as sorted unique row indices."""
        idx = list(channel_indices)
        if not idx:
            raise ConfigError("channel subset must be non-empty")
        if idx != sorted(set(idx)):
            raise ConfigError("channel subset must be sorted and unique")
        if idx[0] < 0 or idx[-1] >= self.n_channels:
            raise ConfigError(
                f"channel index out of range: {idx} for {self.n_channels} channels"
            )
        labels = tuple(self.channel_labels[i] for i in idx)
        trials = tuple(replace(t, data=t.data[idx]) for t in self.trials)
        return replace(self, channel_labels=labels, trials=trials)


@dataclass(frozen=True)
class Window:
    """A fixed-length slice of a trial, used as one decoder input."""

    data: np.ndarray
    label: int
    subject_id: int
    trial_id: int
    window_index: int
    start_sample: int = 0

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ConfigError(f"window data must be 2-D, got shape {arr.shape}")
        object.__setattr__(self, "data", arr)

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


def _trial_filename(index: int) -> str:
    return f"trial_{index:05d}.eegt"


def save_dataset(dataset: EegDataset, path: str | Path) -> Path:
    """Write a dataset directory (manifest + one binary file per trial)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, trial in enumerate(dataset.trials):
        if np.max(np.abs(trial.data), initial=0.0) > _F32_MAX:
            raise ConfigError(
                f"trial {trial.trial_id} exceeds float32 range and cannot be stored"
            )
        name = _trial_filename(i)
        payload = trial.data.astype("<f4").tobytes(order="C")
        header = _TRIAL_HEADER.pack(
            _TRIAL_MAGIC, trial.n_channels, trial.n_samples, 0
        )
        (root / name).write_bytes(header + payload)
        entries.append(
            {
                "file": name,
                "label": int(trial.label),
                "subject_id": int(trial.subject_id),
                "trial_id": int(trial.trial_id),
            }
        )
    manifest = {
        "fs": float(dataset.fs),
        "channel_labels": list(dataset.channel_labels),
        "class_names": list(dataset.class_names),
        "trials": entries,
    }
    with open(root / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return root


def _read_trial_file(path: Path, n_channels_expected: int) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < _TRIAL_HEADER.size:
        raise DataFormatError(f"{path.name}: truncated header")
    magic, n_ch, n_samp, reserved = _TRIAL_HEADER.unpack_from(raw)
    if magic != _TRIAL_MAGIC:
        raise DataFormatError(f"{path.name}: bad magic {magic!r}")
    if reserved != 0:
        raise DataFormatError(f"{path.name}: reserved header field must be 0")
    if n_ch != n_channels_expected:
        raise DataFormatError(
            f"{path.name}: {n_ch} channels in header, manifest says "
            f"{n_channels_expected}"
        )
    expected_bytes = _TRIAL_HEADER.size + 4 * n_ch * n_samp
    if len(raw) != expected_bytes:
        raise DataFormatError(
            f"{path.name}: expected {expected_bytes} bytes, found {len(raw)}"
        )
    flat = np.frombuffer(raw, dtype="<f4", offset=_TRIAL_HEADER.size)
    return flat.reshape(n_ch, n_samp).astype(np.float64)


def load_dataset(path: str | Path) -> EegDataset:
    """Read a dataset directory written by :func:`save_dataset`."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise DataFormatError(f"no manifest.json under {root}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"manifest.json is not valid JSON: {exc}") from exc
    for key in ("fs", "channel_labels", "class_names", "trials"):
        if key not in manifest:
            raise DataFormatError(f"manifest.json missing key {key!r}")
    labels = tuple(str(s) for s in manifest["channel_labels"])
    trials = []
    for entry in manifest["trials"]:
        data = _read_trial_file(root / entry["file"], len(labels))
        trials.append(
            EegTrial(
                data=data,
                label=int(entry["label"]),
                subject_id=int(entry["subject_id"]),
                trial_id=int(entry["trial_id"]),
            )
        )
    return EegDataset(
        fs=float(manifest["fs"]),
        channel_labels=labels,
        class_names=tuple(str(s) for s in manifest["class_names"]),
        trials=tuple(trials),
    )
