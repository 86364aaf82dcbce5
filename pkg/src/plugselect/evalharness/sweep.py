"""Channel-density sweep: retrain-and-evaluate at each channel budget.

Per subject: split trials, window, fit normalization on the training
side, train a full-channel decoder, and attribute its decisions to
channels.  Per density: turn the per-subject attributions into a
task-level channel set (or several random ones), retrain a decoder per
subject on just those channels, and score it on the held-out windows.
Metrics are reported as mean ± std across subjects; the random strategy
averages each subject's metrics over its sets first.

Everything is driven by named seeds.  Per-subject seeds are derived
with fixed documented offsets, so results are bit-reproducible and
independent of the worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..attribution import IgConfig, SubjectAttribution, attribute_subject
from ..diffnet.model import Model, ModelConfig, build_model
from ..diffnet.train import TrainSpec, train
from ..eegdata.augment import sr_augment
from ..eegdata.dataset import EegDataset, Window
from ..eegdata.preprocess import segment_windows, zscore_apply_all, zscore_fit
from ..eegdata.synth import split_train_test
from ..errors import ConfigError, NumericError
from ..ranking import (
    ChannelRanking,
    random_subsets,
    rank_averaging,
    rank_voting,
    select_top,
)
from .metrics import (
    ClassificationMetrics,
    MetricsReport,
    aggregate_metrics,
    auc,
    confusion,
    effective_acc,
    metrics_from_counts,
)
from .throughput import measure_fps

# fixed offsets separating the per-subject random streams derived from
# the named seeds (init/shuffle from model_seed, augmentation from split_seed)
_SALT_SHUFFLE = 100003
_SALT_AUGMENT = 200003

_STRATEGIES = ("averaging", "voting", "random")


@dataclass(frozen=True)
class ModelTemplate:
    """Decoder hyperparameters; input dims are filled in per subject."""

    n_temporal: int = 8
    temporal_width: int = 17
    n_spatial: int = 8
    pool_width: int = 4
    n_hidden: int = 32
    activation: str = "relu"

    def config(
        self, n_channels: int, n_samples: int, n_classes: int, seed: int
    ) -> ModelConfig:
        return ModelConfig(
            n_channels=n_channels,
            n_samples=n_samples,
            n_temporal=self.n_temporal,
            temporal_width=self.temporal_width,
            n_spatial=self.n_spatial,
            pool_width=self.pool_width,
            n_hidden=self.n_hidden,
            n_classes=n_classes,
            activation=self.activation,
            seed=seed,
        )


@dataclass(frozen=True)
class SweepConfig:
    window_seconds: float = 0.5
    overlap_fraction: float = 0.0
    test_fraction: float = 0.25
    augment_factor: int = 1
    augment_segments: int = 4
    model: ModelTemplate = field(default_factory=ModelTemplate)
    train: TrainSpec = field(default_factory=TrainSpec)
    ig: IgConfig = field(default_factory=IgConfig)
    n_random_sets: int = 5
    voting_k: int | None = None  # None: k equals the density's channel count
    model_seed: int = 0
    split_seed: int = 0
    subset_seed: int = 0
    fps_warmup: int = 50
    fps_reps: int = 1000  # 0 disables throughput measurement entirely
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.augment_factor < 1:
            raise ConfigError(
                f"augment_factor must be >= 1, got {self.augment_factor}"
            )
        if self.n_random_sets < 1:
            raise ConfigError(f"n_random_sets must be >= 1, got {self.n_random_sets}")
        if self.fps_warmup < 0 or self.fps_reps < 0:
            raise ConfigError("fps_warmup and fps_reps must be >= 0")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


@dataclass(frozen=True, eq=False)
class SubjectRun:
    """One subject's prepared state: windows, full model, attribution."""

    subject_id: int
    train_windows: tuple[Window, ...]  # normalized, full channel set
    test_windows: tuple[Window, ...]
    full_model: Model
    attribution: SubjectAttribution
    completeness_gap_mean: float
    loss_history: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class PruneResult:
    """One density row of the sweep."""

    strategy: str
    eta: float
    c: int
    channel_sets: tuple[tuple[int, ...], ...]
    metrics: MetricsReport
    fps: float | None
    effective: bool
    per_subject: tuple[dict, ...]


@dataclass(frozen=True)
class BalanceCurve:
    etas: tuple[float, ...]
    relative_acc: tuple[float, ...]
    relative_ce: tuple[float, ...]


def _train_seed(cfg: SweepConfig, subject_id: int) -> int:
    return cfg.model_seed + _SALT_SHUFFLE + subject_id


def subject_windows(
    dataset: EegDataset, cfg: SweepConfig, subject_id: int
) -> tuple[list[Window], list[Window]]:
    """One subject's normalized train/test windows under the named seeds.

    Deterministic given (dataset, cfg, subject_id), so separate pipeline
    stages recover identical windows without sharing state on disk.
    """
    sub = dataset.for_subject(subject_id)
    train_ds, test_ds = split_train_test(
        sub, cfg.test_fraction, seed=cfg.split_seed + subject_id
    )
    if cfg.augment_factor > 1:
        train_trials = sr_augment(
            list(train_ds.trials),
            cfg.augment_segments,
            cfg.augment_factor,
            seed=cfg.split_seed + _SALT_AUGMENT + subject_id,
        )
        train_ds = replace(train_ds, trials=tuple(train_trials))
    train_w = segment_windows(train_ds, cfg.window_seconds, cfg.overlap_fraction)
    test_w = segment_windows(test_ds, cfg.window_seconds, cfg.overlap_fraction)
    stats = zscore_fit(train_w)
    return zscore_apply_all(train_w, stats), zscore_apply_all(test_w, stats)


def train_subject_model(
    dataset: EegDataset,
    cfg: SweepConfig,
    subject_id: int,
    train_w: list[Window],
) -> tuple[Model, list[float]]:
    """Initialize and train one subject's full-channel decoder.

    Seeds derive from (cfg, subject_id) alone, so a model retrained from
    the same windows reproduces the same parameters exactly.
    """
    model_cfg = cfg.model.config(
        n_channels=dataset.n_channels,
        n_samples=train_w[0].n_samples,
        n_classes=dataset.n_classes,
        seed=cfg.model_seed + subject_id,
    )
    spec = replace(cfg.train, seed=_train_seed(cfg, subject_id))
    try:
        return train(build_model(model_cfg), train_w, spec)
    except NumericError as exc:
        raise NumericError(f"subject {subject_id}: {exc}") from exc


def _prepare_one(args: tuple[EegDataset, SweepConfig, int]) -> SubjectRun:
    dataset, cfg, subject_id = args
    train_w, test_w = subject_windows(dataset, cfg, subject_id)
    model, history = train_subject_model(dataset, cfg, subject_id, train_w)
    attribution, gap_mean = attribute_subject(model, train_w, cfg.ig)
    return SubjectRun(
        subject_id=subject_id,
        train_windows=tuple(train_w),
        test_windows=tuple(test_w),
        full_model=model,
        attribution=attribution,
        completeness_gap_mean=gap_mean,
        loss_history=tuple(history),
    )


def prepare_subjects(dataset: EegDataset, cfg: SweepConfig) -> list[SubjectRun]:
    """Split/window/normalize/train/attribute every subject, in id order."""
    tasks = [(dataset, cfg, sid) for sid in dataset.subject_ids]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_prepare_one, tasks))
    return [_prepare_one(t) for t in tasks]


def _restrict_windows(
    windows: tuple[Window, ...], channels: tuple[int, ...]
) -> list[Window]:
    idx = list(channels)
    return [replace(w, data=w.data[idx]) for w in windows]


def _score_model(
    model: Model, test_windows: list[Window], n_classes: int
) -> ClassificationMetrics:
    x = np.stack([w.data for w in test_windows])
    y = np.array([w.label for w in test_windows], dtype=np.int64)
    logits = model.forward_batch(x)
    preds = np.argmax(logits, axis=1)
    base = metrics_from_counts(confusion(y, preds, n_classes))
    if n_classes == 2 and len(set(y.tolist())) == 2:
        scores = logits[:, 1] - logits[:, 0]
        return replace(base, auc=auc(scores, y))
    return base


def _evaluate_one(
    args: tuple[SubjectRun, tuple[int, ...], SweepConfig, int, int]
) -> ClassificationMetrics:
    run, channels, cfg, n_classes, n_channels_full = args
    if len(channels) == n_channels_full:
        model = run.full_model  # identity selection: reuse the trained model
        test_w = list(run.test_windows)
    else:
        train_w = _restrict_windows(run.train_windows, channels)
        test_w = _restrict_windows(run.test_windows, channels)
        model_cfg = cfg.model.config(
            n_channels=len(channels),
            n_samples=train_w[0].n_samples,
            n_classes=n_classes,
            seed=cfg.model_seed + run.subject_id,
        )
        spec = replace(cfg.train, seed=_train_seed(cfg, run.subject_id))
        try:
            model, _ = train(build_model(model_cfg), train_w, spec)
        except NumericError as exc:
            raise NumericError(
                f"subject {run.subject_id}, c={len(channels)}: {exc}"
            ) from exc
    return _score_model(model, test_w, n_classes)


def _mean_over_sets(
    per_set: list[ClassificationMetrics],
) -> ClassificationMetrics:
    """Average one subject's metrics over channel sets (None left out)."""

    def avg(vals: list[float | None]) -> float | None:
        defined = [v for v in vals if v is not None]
        return float(np.mean(defined)) if defined else None

    return ClassificationMetrics(
        acc=float(np.mean([m.acc for m in per_set])),
        sen=avg([m.sen for m in per_set]),
        spe=avg([m.spe for m in per_set]),
        f1=avg([m.f1 for m in per_set]),
        auc=avg([m.auc for m in per_set]),
    )


def _channel_count(density: float, n_channels: int) -> int:
    c = int(round(density * n_channels))
    if c < 1:
        raise ConfigError(
            f"density {density} selects zero of {n_channels} channels; "
            f"use a density of at least {0.5 / n_channels}"
        )
    return min(c, n_channels)


def ranking_for_density(
    strategy: str,
    attrs: list[SubjectAttribution],
    c: int,
    cfg: SweepConfig,
) -> ChannelRanking | None:
    """The task-level ranking used at one density (None for random)."""
    if strategy == "averaging":
        return rank_averaging(attrs)
    if strategy == "voting":
        k = cfg.voting_k if cfg.voting_k is not None else c
        k = min(max(k, 1), attrs[0].n_channels)
        return rank_voting(attrs, k)
    return None


def _sets_for_density(
    strategy: str,
    attrs: list[SubjectAttribution],
    c: int,
    n_channels: int,
    cfg: SweepConfig,
) -> tuple[tuple[int, ...], ...]:
    if strategy == "random":
        # distinct seed per channel count keeps the five sets independent
        # across densities while staying reproducible; duplicate draws
        # (certain at c = C) would only re-measure the same model, so they
        # collapse to one
        sets = random_subsets(
            n_channels, c, n_sets=cfg.n_random_sets, seed=cfg.subset_seed + c
        )
        return tuple(dict.fromkeys(tuple(sorted(s)) for s in sets))
    ranking = ranking_for_density(strategy, attrs, c, cfg)
    selected, _ = select_top(ranking, c)
    return (tuple(sorted(selected)),)


def prune_and_evaluate(
    dataset: EegDataset,
    strategy: str,
    densities: list[float],
    cfg: SweepConfig,
    runs: list[SubjectRun] | None = None,
) -> list[PruneResult]:
    """Run the full sweep; ``runs`` may carry pre-prepared subject state."""
    if strategy not in _STRATEGIES:
        raise ConfigError(
            f"strategy must be one of {_STRATEGIES}, got {strategy!r}"
        )
    if not densities:
        raise ConfigError("need at least one density")
    for d in densities:
        if not 0.0 < d <= 1.0:
            raise ConfigError(f"density {d} outside (0, 1]")
    if runs is None:
        runs = prepare_subjects(dataset, cfg)
    attrs = [r.attribution for r in runs]
    n_channels = dataset.n_channels
    n_classes = dataset.n_classes

    results: list[PruneResult] = []
    for density in densities:
        c = _channel_count(density, n_channels)
        channel_sets = _sets_for_density(strategy, attrs, c, n_channels, cfg)
        tasks = [
            (run, channels, cfg, n_classes, n_channels)
            for run in runs
            for channels in channel_sets
        ]
        if cfg.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                flat = list(pool.map(_evaluate_one, tasks))
        else:
            flat = [_evaluate_one(t) for t in tasks]
        n_sets = len(channel_sets)
        per_subject_metrics = [
            _mean_over_sets(flat[i * n_sets : (i + 1) * n_sets])
            for i in range(len(runs))
        ]
        report = aggregate_metrics(per_subject_metrics)
        fps = None
        if cfg.fps_reps > 0:
            # measured on the first subject's model for the first set,
            # serialized so no concurrent work skews the clock
            first = runs[0]
            if len(channel_sets[0]) == n_channels:
                fps_model = first.full_model
                fps_windows = list(first.test_windows)
            else:
                fps_windows = _restrict_windows(
                    first.test_windows, channel_sets[0]
                )
                fps_model, _ = train(
                    build_model(
                        cfg.model.config(
                            n_channels=len(channel_sets[0]),
                            n_samples=fps_windows[0].n_samples,
                            n_classes=n_classes,
                            seed=cfg.model_seed + first.subject_id,
                        )
                    ),
                    _restrict_windows(first.train_windows, channel_sets[0]),
                    replace(cfg.train, seed=_train_seed(cfg, first.subject_id)),
                )
            fps = measure_fps(
                fps_model, fps_windows, warmup=cfg.fps_warmup, reps=cfg.fps_reps
            )
        _, effective = effective_acc(report.acc_mean, n_classes)
        per_subject = tuple(
            {
                "subject_id": run.subject_id,
                "acc": m.acc,
                "auc": m.auc,
                "f1": m.f1,
                "spe": m.spe,
                "sen": m.sen,
            }
            for run, m in zip(runs, per_subject_metrics)
        )
        results.append(
            PruneResult(
                strategy=strategy,
                eta=c / n_channels,
                c=c,
                channel_sets=channel_sets,
                metrics=report,
                fps=fps,
                effective=effective,
                per_subject=per_subject,
            )
        )
    return results


def balance_curve(results: list[PruneResult]) -> BalanceCurve:
    """Relative accuracy and relative throughput per density, ascending."""
    if not results:
        raise ConfigError("no results to build a balance curve from")
    rows = sorted(results, key=lambda r: r.eta)
    full = [r for r in rows if abs(r.eta - 1.0) <= 1e-12]
    if not full:
        raise ConfigError("balance curve needs the full-density row (eta = 1.0)")
    if any(r.fps is None for r in rows):
        raise ConfigError(
            "balance curve needs throughput on every row; rerun with fps_reps > 0"
        )
    full_acc = full[0].metrics.acc_mean
    if full_acc <= 0:
        raise ConfigError("full-density accuracy is zero; curve undefined")
    max_fps = max(r.fps for r in rows)
    return BalanceCurve(
        etas=tuple(r.eta for r in rows),
        relative_acc=tuple(r.metrics.acc_mean / full_acc for r in rows),
        relative_ce=tuple(r.fps / max_fps for r in rows),
    )
