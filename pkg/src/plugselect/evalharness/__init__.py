"""Evaluation harness: metrics, throughput, density sweeps, reports."""
from .metrics import (
    ClassificationMetrics,
    ConfusionCounts,
    MetricsReport,
    aggregate_metrics,
    auc,
    confusion,
    effective_acc,
    metrics_from_counts,
)
from .report import emit_balance_csv, emit_report, load_report_rows
from .sweep import (
    BalanceCurve,
    ModelTemplate,
    PruneResult,
    SubjectRun,
    SweepConfig,
    balance_curve,
    prepare_subjects,
    prune_and_evaluate,
    ranking_for_density,
    subject_windows,
    train_subject_model,
)
from .throughput import measure_fps
from .topomap import emit_topomap_svg

__all__ = [
    "BalanceCurve",
    "ClassificationMetrics",
    "ConfusionCounts",
    "MetricsReport",
    "ModelTemplate",
    "PruneResult",
    "SubjectRun",
    "SweepConfig",
    "aggregate_metrics",
    "auc",
    "balance_curve",
    "confusion",
    "effective_acc",
    "emit_balance_csv",
    "emit_report",
    "emit_topomap_svg",
    "load_report_rows",
    "measure_fps",
    "metrics_from_counts",
    "prepare_subjects",
    "prune_and_evaluate",
    "ranking_for_density",
    "subject_windows",
    "train_subject_model",
]
