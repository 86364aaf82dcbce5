"""Channel attribution by gradient quadrature along a baseline-to-input path.

For an input x and baseline x', the path point at step m of M is
``x' + (m/M)(x - x')``.  Gradients of the target logit are accumulated
at the right endpoints m = 1..M, and the elementwise contribution is
``(x - x') * (G / M)`` where G is the gradient sum.  Per-channel scores
are the mean of that matrix over the time axis; per-subject scores are
the sum over windows, optionally scaled so the largest magnitude is 1.

The quadrature quality is observable: the contribution matrix summed
over all entries should approach ``h(x) - h(x')`` as M grows, and the
absolute difference (the completeness gap) is reported alongside every
aggregate so callers can judge whether M was large enough.

The engine is decoder-agnostic: any object with ``config``, ``forward``
and ``input_gradient`` (optionally the batched ``input_gradient_batch``)
can be attributed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eegdata.dataset import Window
from .errors import ConfigError, NumericError

_TARGET_RULES = ("true_label", "predicted_label")


@dataclass(frozen=True, eq=False)
class IgConfig:
    steps: int = 64
    baseline: np.ndarray | None = None  # None means the all-zero input
    target_rule: str = "true_label"
    normalize: bool = True

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.target_rule not in _TARGET_RULES:
            raise ConfigError(
                f"target_rule must be one of {_TARGET_RULES}, got "
                f"{self.target_rule!r}"
            )
        if self.baseline is not None:
            arr = np.asarray(self.baseline, dtype=np.float64)
            if arr.ndim != 2:
                raise ConfigError("baseline must be a 2-D matrix")
            if not np.all(np.isfinite(arr)):
                raise ConfigError("baseline contains non-finite values")
            object.__setattr__(self, "baseline", arr)


@dataclass(frozen=True, eq=False)
class WindowAttribution:
    values: np.ndarray  # per-channel score, length C
    window_index: int
    subject_id: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ConfigError("window attribution values must be 1-D")
        if not np.all(np.isfinite(arr)):
            raise NumericError(
                f"window {self.window_index} attribution is non-finite"
            )
        object.__setattr__(self, "values", arr)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class SubjectAttribution:
    values: np.ndarray
    n_windows: int
    subject_id: int
    normalized: bool

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise ConfigError("subject attribution must be a finite 1-D vector")
        object.__setattr__(self, "values", arr)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]


def path_point(
    x: np.ndarray, baseline: np.ndarray, m: int, steps: int
) -> np.ndarray:
    """The interpolated input at step m of ``steps`` (m = steps gives x)."""
    x = np.asarray(x, dtype=np.float64)
    baseline = np.asarray(baseline, dtype=np.float64)
    if x.shape != baseline.shape:
        raise ConfigError(
            f"baseline shape {baseline.shape} does not match input {x.shape}"
        )
    if not 1 <= m <= steps:
        raise ConfigError(f"step index {m} outside [1, {steps}]")
    return baseline + (m / steps) * (x - baseline)


def _resolve_baseline(cfg: IgConfig, shape: tuple[int, ...]) -> np.ndarray:
    if cfg.baseline is None:
        return np.zeros(shape, dtype=np.float64)
    if cfg.baseline.shape != shape:
        raise ConfigError(
            f"baseline shape {cfg.baseline.shape} does not match input {shape}"
        )
    return cfg.baseline


def _resolve_target(model, window: Window, cfg: IgConfig) -> int:
    if cfg.target_rule == "true_label":
        return int(window.label)
    return int(model.predict(window.data))


def contribution_matrix(
    model, x: np.ndarray, baseline: np.ndarray, target: int, steps: int
) -> np.ndarray:
    """The elementwise (C, T) contribution of every input entry."""
    x = np.asarray(x, dtype=np.float64)
    fractions = np.arange(1, steps + 1, dtype=np.float64)[:, None, None] / steps
    points = baseline[None] + fractions * (x - baseline)[None]
    if hasattr(model, "input_gradient_batch"):
        grads = model.input_gradient_batch(points, target)
        total = grads.sum(axis=0)
    else:
        total = np.zeros_like(x)
        for m in range(steps):
            total += model.input_gradient(points[m], target)
    return (x - baseline) * (total / steps)


def _window_matrix(
    model, window: Window, cfg: IgConfig
) -> tuple[np.ndarray, np.ndarray, int]:
    baseline = _resolve_baseline(cfg, window.data.shape)
    target = _resolve_target(model, window, cfg)
    matrix = contribution_matrix(model, window.data, baseline, target, cfg.steps)
    if not np.all(np.isfinite(matrix)):
        raise NumericError(
            f"attribution produced non-finite values on window "
            f"{window.window_index} (subject {window.subject_id})"
        )
    return matrix, baseline, target


def _gap_from_matrix(
    model, window: Window, matrix: np.ndarray, baseline: np.ndarray, target: int
) -> float:
    h_x = float(model.forward(window.data)[target])
    h_base = float(model.forward(baseline)[target])
    return abs(float(matrix.sum()) - (h_x - h_base))


def integrated_gradients_window(
    model, window: Window, cfg: IgConfig
) -> WindowAttribution:
    """Per-channel contribution of one window: time-mean of the matrix."""
    matrix, _, _ = _window_matrix(model, window, cfg)
    return WindowAttribution(
        values=matrix.mean(axis=1),
        window_index=window.window_index,
        subject_id=window.subject_id,
    )


def completeness_gap(model, window: Window, cfg: IgConfig) -> float:
    """|sum of contributions - (h(x) - h(baseline))| for one window."""
    matrix, baseline, target = _window_matrix(model, window, cfg)
    return _gap_from_matrix(model, window, matrix, baseline, target)


def aggregate_subject(
    window_attrs: list[WindowAttribution], normalize: bool
) -> SubjectAttribution:
    """Sum window scores; optionally scale so max |value| is 1.

    The reduction order is the list order, so equal inputs aggregate to
    bit-identical results no matter how the per-window values were produced.
    """
    if not window_attrs:
        raise ConfigError("cannot aggregate zero window attributions")
    subject = window_attrs[0].subject_id
    n_ch = window_attrs[0].n_channels
    for a in window_attrs:
        if a.subject_id != subject:
            raise ConfigError(
                f"mixed subjects in aggregation: {subject} vs {a.subject_id}"
            )
        if a.n_channels != n_ch:
            raise ConfigError("window attributions disagree on channel count")
    total = np.zeros(n_ch, dtype=np.float64)
    for a in window_attrs:
        total += a.values
    if normalize:
        peak = np.max(np.abs(total))
        if peak > 0.0:
            total = total / peak
    return SubjectAttribution(
        values=total,
        n_windows=len(window_attrs),
        subject_id=subject,
        normalized=normalize,
    )


def attribute_subject(
    model,
    windows: list[Window],
    cfg: IgConfig,
    correct_only: bool = False,
) -> tuple[SubjectAttribution, float]:
    """Attribute every window of one subject; also return the mean gap.

    ``correct_only`` drops windows the model misclassifies before
    aggregating (off by default: every window participates).
    """
    if not windows:
        raise ConfigError("no windows to attribute")
    kept = windows
    if correct_only:
        kept = [w for w in windows if model.predict(w.data) == w.label]
        if not kept:
            raise ConfigError(
                f"correct_only filtered out every window for subject "
                f"{windows[0].subject_id}"
            )
    attrs: list[WindowAttribution] = []
    gaps: list[float] = []
    for w in kept:
        matrix, baseline, target = _window_matrix(model, w, cfg)
        attrs.append(
            WindowAttribution(
                values=matrix.mean(axis=1),
                window_index=w.window_index,
                subject_id=w.subject_id,
            )
        )
        gaps.append(_gap_from_matrix(model, w, matrix, baseline, target))
    aggregate = aggregate_subject(attrs, cfg.normalize)
    return aggregate, float(np.mean(gaps))


def subject_attribution_to_dict(
    attr: SubjectAttribution,
    channel_labels: list[str] | tuple[str, ...],
    cfg: IgConfig,
    completeness_gap_mean: float,
) -> dict:
    """JSON-ready export of one subject's aggregated attribution."""
    if len(channel_labels) != attr.n_channels:
        raise ConfigError(
            f"{len(channel_labels)} labels for {attr.n_channels} channels"
        )
    return {
        "subject_id": attr.subject_id,
        "n_windows": attr.n_windows,
        "M": cfg.steps,
        "target_rule": cfg.target_rule,
        "normalized": attr.normalized,
        "channel_labels": list(channel_labels),
        "values": [float(v) for v in attr.values],
        "completeness_gap_mean": completeness_gap_mean,
    }


def subject_attribution_from_dict(payload: dict) -> SubjectAttribution:
    """Inverse of :func:`subject_attribution_to_dict` (labels dropped)."""
    return SubjectAttribution(
        values=np.asarray(payload["values"], dtype=np.float64),
        n_windows=int(payload["n_windows"]),
        subject_id=int(payload["subject_id"]),
        normalized=bool(payload["normalized"]),
    )
