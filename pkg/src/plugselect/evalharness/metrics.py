"""Classification metrics with strict undefined-value semantics.

The binary positive class is index 1.  Ratios with zero denominators
(e.g. sensitivity when no positives were evaluated) are reported as
``None`` — absent, never silently zero.  SEN/SPE/F1/AUC exist only for
binary tasks; multiclass reports accuracy alone.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import ConfigError


@dataclass(frozen=True, eq=False)
class ConfusionCounts:
    matrix: np.ndarray  # (K, K); rows = true class, columns = predicted

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=np.int64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 2:
            raise ConfigError(f"confusion matrix must be KxK (K>=2), got {mat.shape}")
        if np.any(mat < 0):
            raise ConfigError("confusion counts must be non-negative")
        object.__setattr__(self, "matrix", mat)

    @property
    def n_classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    def _binary_only(self) -> None:
        if self.n_classes != 2:
            raise ConfigError(
                f"tp/fp/tn/fn require a binary task, got {self.n_classes} classes"
            )

    @property
    def tp(self) -> int:
        self._binary_only()
        return int(self.matrix[1, 1])

    @property
    def tn(self) -> int:
        self._binary_only()
        return int(self.matrix[0, 0])

    @property
    def fp(self) -> int:
        self._binary_only()
        return int(self.matrix[0, 1])

    @property
    def fn(self) -> int:
        self._binary_only()
        return int(self.matrix[1, 0])


def confusion(y_true, y_pred, n_classes: int) -> ConfusionCounts:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ConfigError(
            f"labels and predictions must be equal-length vectors, got "
            f"{y_true.shape} vs {y_pred.shape}"
        )
    if y_true.shape[0] == 0:
        raise ConfigError("cannot build a confusion matrix from zero samples")
    if n_classes < 2:
        raise ConfigError(f"n_classes must be >= 2, got {n_classes}")
    for name, arr in (("labels", y_true), ("predictions", y_pred)):
        if np.any(arr < 0) or np.any(arr >= n_classes):
            raise ConfigError(f"{name} out of range [0, {n_classes})")
    mat = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(mat, (y_true, y_pred), 1)
    return ConfusionCounts(matrix=mat)


@dataclass(frozen=True)
class ClassificationMetrics:
    """Single-evaluation metric values; None marks an undefined ratio."""

    acc: float
    sen: float | None = None
    spe: float | None = None
    f1: float | None = None
    auc: float | None = None


def metrics_from_counts(counts: ConfusionCounts) -> ClassificationMetrics:
    if counts.total == 0:
        raise ConfigError("confusion matrix has zero total count")
    acc = float(np.trace(counts.matrix)) / counts.total
    if counts.n_classes != 2:
        return ClassificationMetrics(acc=acc)
    tp, tn, fp, fn = counts.tp, counts.tn, counts.fp, counts.fn
    sen = tp / (tp + fn) if (tp + fn) > 0 else None
    spe = tn / (tn + fp) if (tn + fp) > 0 else None
    f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else None
    return ClassificationMetrics(acc=acc, sen=sen, spe=spe, f1=f1)


def auc(scores_for_class1, y_true) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg), ties credited 0.5."""
    scores = np.asarray(scores_for_class1, dtype=np.float64)
    y_true = np.asarray(y_true, dtype=np.int64)
    if scores.shape != y_true.shape or scores.ndim != 1:
        raise ConfigError("scores and labels must be equal-length vectors")
    if np.any((y_true != 0) & (y_true != 1)):
        raise ConfigError("AUC needs binary labels in {0, 1}")
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise ConfigError(
            f"AUC undefined: need both classes present, got {n_pos} positives "
            f"and {n_neg} negatives"
        )
    ranks = rankdata(scores)  # average ranks give exactly 0.5 credit per tie
    rank_sum = float(np.sum(ranks[y_true == 1]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def effective_acc(acc: float, n_classes: int) -> tuple[float, bool]:
    """Mark accuracy as effective only if strictly above chance level."""
    if n_classes < 2:
        raise ConfigError(f"n_classes must be >= 2, got {n_classes}")
    return acc, acc > 1.0 / n_classes


@dataclass(frozen=True)
class MetricsReport:
    """Across-subject mean and std of each metric (std with ddof=1)."""

    n_subjects: int
    acc_mean: float
    acc_std: float
    auc_mean: float | None = None
    auc_std: float | None = None
    f1_mean: float | None = None
    f1_std: float | None = None
    spe_mean: float | None = None
    spe_std: float | None = None
    sen_mean: float | None = None
    sen_std: float | None = None


def _mean_std(values: list[float | None]) -> tuple[float | None, float | None]:
    defined = [v for v in values if v is not None]
    if not defined:
        return None, None
    arr = np.asarray(defined, dtype=np.float64)
    std = float(arr.std(ddof=1)) if arr.shape[0] > 1 else 0.0
    return float(arr.mean()), std


def aggregate_metrics(per_subject: list[ClassificationMetrics]) -> MetricsReport:
    """Mean ± std across subjects; undefined values are left out per metric."""
    if not per_subject:
        raise ConfigError("no per-subject metrics to aggregate")
    acc_mean, acc_std = _mean_std([m.acc for m in per_subject])
    auc_mean, auc_std = _mean_std([m.auc for m in per_subject])
    f1_mean, f1_std = _mean_std([m.f1 for m in per_subject])
    spe_mean, spe_std = _mean_std([m.spe for m in per_subject])
    sen_mean, sen_std = _mean_std([m.sen for m in per_subject])
    return MetricsReport(
        n_subjects=len(per_subject),
        acc_mean=acc_mean,
        acc_std=acc_std,
        auc_mean=auc_mean,
        auc_std=auc_std,
        f1_mean=f1_mean,
        f1_std=f1_std,
        spe_mean=spe_mean,
        spe_std=spe_std,
        sen_mean=sen_mean,
        sen_std=sen_std,
    )
