"""Synthetic EEG with planted informative channels.

Class identity is carried by a class-specific sinusoid on a small set of
"informative" channels; every other channel is white noise.  The planted
set is returned alongside the dataset, giving downstream channel-selection
code a ground truth to be scored against.  Generated values are quantized
through float32 so a save/load round-trip reproduces them bit-exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigError
from ..montage import default_channel_labels
from .dataset import EegDataset, EegTrial


@dataclass(frozen=True)
class SynthSpec:
    n_channels: int = 16
    n_informative: int = 4
    n_subjects: int = 20
    trials_per_subject: int = 40
    fs: float = 128.0
    trial_seconds: float = 2.0
    n_classes: int = 2
    carrier_hz_per_class: tuple[float, ...] = (10.0, 14.0)
    signal_amplitude: float = 1.0
    noise_amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not 1 <= self.n_informative <= self.n_channels:
            raise ConfigError(
                f"need 1 <= n_informative <= n_channels, got "
                f"{self.n_informative}/{self.n_channels}"
            )
        if self.n_subjects < 1 or self.trials_per_subject < 1:
            raise ConfigError("need at least one subject and one trial per subject")
        if self.fs <= 0 or self.trial_seconds <= 0:
            raise ConfigError("fs and trial_seconds must be positive")
        if self.n_classes < 2:
            raise ConfigError(f"need at least 2 classes, got {self.n_classes}")
        if len(self.carrier_hz_per_class) < self.n_classes:
            raise ConfigError(
                f"{self.n_classes} classes need {self.n_classes} carrier "
                f"frequencies, got {len(self.carrier_hz_per_class)}"
            )
        if self.signal_amplitude < 0 or self.noise_amplitude < 0:
            raise ConfigError("amplitudes must be non-negative")
        for hz in self.carrier_hz_per_class[: self.n_classes]:
            if hz <= 0 or hz >= self.fs / 2:
                raise ConfigError(
                    f"carrier {hz} Hz must lie in (0, {self.fs / 2}) at fs={self.fs}"
                )
        if int(round(self.fs * self.trial_seconds)) < 1:
            raise ConfigError("trial shorter than one sample")


def synth_generate(spec: SynthSpec, seed: int) -> tuple[EegDataset, set[int]]:
    """Generate a dataset and the set of planted informative channel indices.

    Draw order is fixed (planted set, per-subject gains, then per-trial
    noise and phases), so equal seeds give bit-identical datasets.
    """
    rng = np.random.default_rng(seed)
    n_samples = int(round(spec.fs * spec.trial_seconds))
    informative = np.sort(
        rng.choice(spec.n_channels, size=spec.n_informative, replace=False)
    )
    # per-(subject, informative-channel) gain mimics subject heterogeneity
    gains = rng.uniform(0.8, 1.2, size=(spec.n_subjects, spec.n_informative))
    t = np.arange(n_samples, dtype=np.float64) / spec.fs

    trials: list[EegTrial] = []
    trial_id = 0
    for subj in range(spec.n_subjects):
        for k in range(spec.trials_per_subject):
            label = k % spec.n_classes
            data = rng.normal(
                0.0, spec.noise_amplitude, size=(spec.n_channels, n_samples)
            ) if spec.noise_amplitude > 0 else np.zeros((spec.n_channels, n_samples))
            carrier = spec.carrier_hz_per_class[label]
            for j, ch in enumerate(informative):
                phase = rng.uniform(0.0, 2.0 * math.pi)
                data[ch] += (
                    spec.signal_amplitude
                    * gains[subj, j]
                    * np.sin(2.0 * math.pi * carrier * t + phase)
                )
            data = data.astype(np.float32).astype(np.float64)
            trials.append(
                EegTrial(data=data, label=label, subject_id=subj, trial_id=trial_id)
            )
            trial_id += 1
    dataset = EegDataset(
        fs=spec.fs,
        channel_labels=tuple(default_channel_labels(spec.n_channels)),
        class_names=tuple(f"class{k}" for k in range(spec.n_classes)),
        trials=tuple(trials),
    )
    return dataset, set(int(c) for c in informative)


def split_train_test(
    dataset: EegDataset, test_fraction: float, seed: int
) -> tuple[EegDataset, EegDataset]:
    """Class-stratified split at trial granularity.

    Rounds the per-class test count to ``round(n * fraction)`` but keeps at
    least one trial on each side, so no class disappears from either split.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    by_class: dict[int, list[int]] = {}
    for i, t in enumerate(dataset.trials):
        by_class.setdefault(t.label, []).append(i)
    rng = np.random.default_rng(seed)
    test_idx: set[int] = set()
    for label in sorted(by_class):
        members = by_class[label]
        if len(members) < 2:
            raise ConfigError(
                f"class {label} has {len(members)} trial(s); cannot split"
            )
        n_test = int(round(len(members) * test_fraction))
        n_test = min(max(n_test, 1), len(members) - 1)
        picked = rng.choice(len(members), size=n_test, replace=False)
        test_idx.update(members[p] for p in picked)
    train_trials = tuple(
        t for i, t in enumerate(dataset.trials) if i not in test_idx
    )
    test_trials = tuple(t for i, t in enumerate(dataset.trials) if i in test_idx)
    return replace(dataset, trials=train_trials), replace(dataset, trials=test_trials)
