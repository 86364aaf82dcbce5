"""Classification metrics against hand-counted and O(n^2) oracles."""
import numpy as np
import pytest

from plugselect.diffnet import ModelConfig, build_model
from plugselect.eegdata import Window
from plugselect.errors import ConfigError
from plugselect.evalharness import (
    ClassificationMetrics,
    ConfusionCounts,
    aggregate_metrics,
    auc,
    confusion,
    effective_acc,
    measure_fps,
    metrics_from_counts,
)

rng = np.random.default_rng(17)


def test_confusion_layout_true_rows_pred_columns():
    counts = confusion([0, 0, 1, 1, 1], [0, 1, 1, 1, 0], n_classes=2)
    np.testing.assert_array_equal(counts.matrix, [[1, 1], [1, 2]])
    assert counts.tp == 2  # class 1 is the positive class
    assert counts.tn == 1
    assert counts.fp == 1
    assert counts.fn == 1
    assert counts.total == 5


def test_metrics_worked_example():
    # tp=1, tn=1, fn=1, fp=0: ACC=2/3, SEN=1/2, SPE=1, F1=2/3
    counts = ConfusionCounts(np.array([[1, 0], [1, 1]]))
    m = metrics_from_counts(counts)
    assert m.acc == pytest.approx(2 / 3)
    assert m.sen == pytest.approx(0.5)
    assert m.spe == pytest.approx(1.0)
    assert m.f1 == pytest.approx(2 / 3)


def test_undefined_ratios_are_none_not_zero():
    # every sample is class 0: sensitivity has a zero denominator
    counts = confusion([0, 0, 0], [0, 1, 0], n_classes=2)
    m = metrics_from_counts(counts)
    assert m.sen is None
    assert m.spe == pytest.approx(2 / 3)
    # no predicted or true positives at all: F1 denominator is zero too
    m2 = metrics_from_counts(ConfusionCounts(np.array([[4, 0], [0, 0]])))
    assert m2.f1 is None and m2.sen is None and m2.acc == 1.0


def test_multiclass_reports_accuracy_only():
    counts = confusion([0, 1, 2, 2], [0, 1, 1, 2], n_classes=3)
    m = metrics_from_counts(counts)
    assert m.acc == pytest.approx(0.75)
    assert m.sen is None and m.spe is None and m.f1 is None and m.auc is None
    with pytest.raises(ConfigError):
        counts.tp  # binary-only accessor


def test_metrics_against_randomized_counting_oracle():
    for trial in range(100):
        r = np.random.default_rng(trial)
        n = int(r.integers(2, 40))
        y = r.integers(0, 2, size=n)
        p = r.integers(0, 2, size=n)
        m = metrics_from_counts(confusion(y, p, 2))
        tp = int(np.sum((y == 1) & (p == 1)))
        tn = int(np.sum((y == 0) & (p == 0)))
        fp = int(np.sum((y == 0) & (p == 1)))
        fn = int(np.sum((y == 1) & (p == 0)))
        assert m.acc == pytest.approx((tp + tn) / n, abs=1e-12)
        if tp + fn:
            assert m.sen == pytest.approx(tp / (tp + fn), abs=1e-12)
        if tn + fp:
            assert m.spe == pytest.approx(tn / (tn + fp), abs=1e-12)
        if 2 * tp + fp + fn:
            assert m.f1 == pytest.approx(2 * tp / (2 * tp + fp + fn), abs=1e-12)


def test_confusion_validation():
    with pytest.raises(ConfigError):
        confusion([0, 1], [0], 2)
    with pytest.raises(ConfigError):
        confusion([], [], 2)
    with pytest.raises(ConfigError):
        confusion([0, 2], [0, 1], 2)  # label out of range
    with pytest.raises(ConfigError):
        ConfusionCounts(np.array([[1, -1], [0, 0]]))
    with pytest.raises(ConfigError):
        ConfusionCounts(np.array([[3]]))


# ------------------------------------------------------------------------ AUC


def _auc_oracle(scores, y):
    """O(n^2) pairwise count: wins + half-credit ties over all pos/neg pairs."""
    pos = [s for s, t in zip(scores, y) if t == 1]
    neg = [s for s, t in zip(scores, y) if t == 0]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def test_auc_perfect_and_inverted():
    y = [0, 0, 1, 1]
    assert auc([0.1, 0.2, 0.8, 0.9], y) == 1.0
    assert auc([0.9, 0.8, 0.2, 0.1], y) == 0.0
    assert auc([0.5, 0.5, 0.5, 0.5], y) == 0.5  # all ties


def test_auc_matches_pairwise_oracle():
    for trial in range(50):
        r = np.random.default_rng(1000 + trial)
        n = int(r.integers(4, 30))
        y = r.integers(0, 2, size=n)
        if len(set(y.tolist())) < 2:
            y[0], y[1] = 0, 1
        scores = np.round(r.standard_normal(n), 1)  # coarse grid forces ties
        assert auc(scores, y) == pytest.approx(_auc_oracle(scores, y), abs=1e-12)


def test_auc_requires_both_classes():
    with pytest.raises(ConfigError):
        auc([0.1, 0.2], [1, 1])
    with pytest.raises(ConfigError):
        auc([0.1, 0.2], [0, 2])


def test_chance_predictor_scores_near_half_auc():
    r = np.random.default_rng(0)
    y = r.integers(0, 2, size=4000)
    scores = r.standard_normal(4000)
    assert abs(auc(scores, y) - 0.5) < 0.05


# ------------------------------------------------------------------ aggregate


def test_effective_requires_strictly_above_chance():
    assert effective_acc(0.51, 2) == (0.51, True)
    assert effective_acc(0.5, 2) == (0.5, False)
    assert effective_acc(0.3, 4) == (0.3, True)
    with pytest.raises(ConfigError):
        effective_acc(0.9, 1)


def test_aggregate_mean_and_sample_std():
    per = [
        ClassificationMetrics(acc=0.8, sen=0.7, spe=None, f1=0.75, auc=0.9),
        ClassificationMetrics(acc=0.6, sen=0.5, spe=0.8, f1=None, auc=0.7),
    ]
    rep = aggregate_metrics(per)
    assert rep.n_subjects == 2
    assert rep.acc_mean == pytest.approx(0.7)
    assert rep.acc_std == pytest.approx(np.std([0.8, 0.6], ddof=1))
    assert rep.sen_mean == pytest.approx(0.6)
    # None values drop out per metric instead of polluting the mean
    assert rep.spe_mean == pytest.approx(0.8)
    assert rep.spe_std == 0.0  # single defined value: zero spread
    assert rep.f1_mean == pytest.approx(0.75)


def test_aggregate_single_subject_and_all_none():
    rep = aggregate_metrics([ClassificationMetrics(acc=0.9)])
    assert rep.acc_mean == 0.9 and rep.acc_std == 0.0
    assert rep.auc_mean is None and rep.auc_std is None
    with pytest.raises(ConfigError):
        aggregate_metrics([])


# ----------------------------------------------------------------- throughput


def test_measure_fps_returns_positive_rate():
    model = build_model(ModelConfig(
        n_channels=3, n_samples=16, n_temporal=2, temporal_width=3,
        n_spatial=2, pool_width=2, n_hidden=4, n_classes=2, seed=0,
    ))
    wins = [
        Window(rng.standard_normal((3, 16)), label=i % 2, subject_id=0,
               trial_id=i, window_index=i)
        for i in range(3)
    ]
    fps = measure_fps(model, wins, warmup=2, reps=20)
    assert fps > 0
    with pytest.raises(ConfigError):
        measure_fps(model, [], warmup=0, reps=5)
    with pytest.raises(ConfigError):
        measure_fps(model, wins, warmup=0, reps=0)
