"""Signal conditioning: band-pass filtering, windowing, normalization.

The band-pass is a Chebyshev type-I design applied forward and backward
(zero phase), so the effective magnitude response is the squared design
response: stop-band attenuation doubles in dB and pass-band ripple dips
can reach twice the design ripple.  ``FilterSpec.order`` counts the
poles of the overall band-pass, i.e. an order-6 band-pass comes from an
order-3 low-pass prototype.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import signal

from ..errors import ConfigError, NumericError
from .dataset import EegDataset, EegTrial, Window


@dataclass(frozen=True)
class FilterSpec:
    low_hz: float
    high_hz: float
    order: int = 6
    ripple_db: float = 0.5

    def __post_init__(self) -> None:
        if self.low_hz <= 0 or self.high_hz <= self.low_hz:
            raise ConfigError(
                f"need 0 < low_hz < high_hz, got [{self.low_hz}, {self.high_hz}]"
            )
        if self.order < 2 or self.order % 2 != 0:
            raise ConfigError(
                f"band-pass order must be a positive even integer, got {self.order}"
            )
        if self.ripple_db <= 0:
            raise ConfigError(f"ripple_db must be positive, got {self.ripple_db}")


def design_bandpass(spec: FilterSpec, fs: float) -> np.ndarray:
    """Second-order sections for the band-pass at sampling rate ``fs``."""
    if spec.high_hz >= fs / 2:
        raise ConfigError(
            f"high edge {spec.high_hz} Hz must stay below Nyquist ({fs / 2} Hz)"
        )
    sos = signal.cheby1(
        spec.order // 2,
        spec.ripple_db,
        [spec.low_hz, spec.high_hz],
        btype="bandpass",
        fs=fs,
        output="sos",
    )
    # poles of every biquad must sit strictly inside the unit circle
    for section in sos:
        poles = np.roots(section[3:])
        if np.any(np.abs(poles) >= 1.0 - 1e-12):
            raise NumericError(
                f"filter design unstable for band [{spec.low_hz}, {spec.high_hz}] "
                f"Hz at fs={fs}; widen the band or lower the order"
            )
    return sos


def bandpass_trial(trial: EegTrial, spec: FilterSpec, fs: float) -> EegTrial:
    """Zero-phase band-pass of every channel of one trial."""
    sos = design_bandpass(spec, fs)
    try:
        filtered = signal.sosfiltfilt(sos, trial.data, axis=1)
    except ValueError as exc:
        raise ConfigError(
            f"trial {trial.trial_id} too short for zero-phase filtering: {exc}"
        ) from exc
    if not np.all(np.isfinite(filtered)):
        raise NumericError(f"filtering produced non-finite samples (trial {trial.trial_id})")
    return replace(trial, data=filtered)


def bandpass_dataset(dataset: EegDataset, spec: FilterSpec) -> EegDataset:
    sos = design_bandpass(spec, dataset.fs)  # design once, fail fast
    del sos
    trials = tuple(bandpass_trial(t, spec, dataset.fs) for t in dataset.trials)
    return replace(dataset, trials=trials)


def segment_windows(
    dataset: EegDataset, window_seconds: float, overlap_fraction: float = 0.0
) -> list[Window]:
    """Cut every trial into fixed-length windows.

    Window length is ``round(fs * window_seconds)`` samples and the hop is
    ``round(length * (1 - overlap_fraction))``.  A trailing remainder
    shorter than one window is dropped.  Window indices count up per
    subject in trial order, so they are unique within a subject.
    """
    if window_seconds <= 0:
        raise ConfigError(f"window_seconds must be positive, got {window_seconds}")
    if not 0.0 <= overlap_fraction < 1.0:
        raise ConfigError(
            f"overlap_fraction must lie in [0, 1), got {overlap_fraction}"
        )
    length = int(round(dataset.fs * window_seconds))
    if length < 1:
        raise ConfigError(
            f"window of {window_seconds} s is shorter than one sample at "
            f"fs={dataset.fs}"
        )
    hop = int(round(length * (1.0 - overlap_fraction)))
    hop = max(hop, 1)
    windows: list[Window] = []
    counters: dict[int, int] = {}
    for trial in dataset.trials:
        if trial.n_samples < length:
            raise ConfigError(
                f"trial {trial.trial_id} has {trial.n_samples} samples, "
                f"shorter than the {length}-sample window"
            )
        for start in range(0, trial.n_samples - length + 1, hop):
            idx = counters.get(trial.subject_id, 0)
            counters[trial.subject_id] = idx + 1
            windows.append(
                Window(
                    data=trial.data[:, start : start + length],
                    label=trial.label,
                    subject_id=trial.subject_id,
                    trial_id=trial.trial_id,
                    window_index=idx,
                    start_sample=start,
                )
            )
    return windows


@dataclass(frozen=True)
class NormStats:
    """Per-channel mean and standard deviation fitted on training data."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        if mean.ndim != 1 or mean.shape != std.shape:
            raise ConfigError("mean and std must be 1-D arrays of equal length")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def n_channels(self) -> int:
        return self.mean.shape[0]

    def restrict(self, channel_indices: list[int]) -> "NormStats":
        return NormStats(self.mean[channel_indices], self.std[channel_indices])


def zscore_fit(windows: list[Window]) -> NormStats:
    """Per-channel mean/std over all samples of all given windows.

    Standard deviation uses the population convention (divide by N).
    """
    if not windows:
        raise ConfigError("cannot fit normalization on zero windows")
    n_ch = windows[0].n_channels
    for w in windows:
        if w.n_channels != n_ch:
            raise ConfigError("windows disagree on channel count")
    stacked = np.concatenate([w.data for w in windows], axis=1)
    mean = stacked.mean(axis=1)
    std = stacked.std(axis=1, ddof=0)
    for c in range(n_ch):
        if not np.isfinite(std[c]) or std[c] <= 0.0:
            raise ConfigError(
                f"channel {c} has zero variance in the normalization fit; "
                f"remove or fix the degenerate channel"
            )
    return NormStats(mean=mean, std=std)


def zscore_apply(window: Window, stats: NormStats) -> Window:
    if window.n_channels != stats.n_channels:
        raise ConfigError(
            f"window has {window.n_channels} channels, stats have "
            f"{stats.n_channels}"
        )
    data = (window.data - stats.mean[:, None]) / stats.std[:, None]
    return replace(window, data=data)


def zscore_apply_all(windows: list[Window], stats: NormStats) -> list[Window]:
    return [zscore_apply(w, stats) for w in windows]
