import numpy as np
import pytest

from biaslens.classify import (
    FeatureSpec,
    TrainConfig,
    pseudo_dataset_check,
    run_feature_trials,
    run_trials,
    sweep,
)
from biaslens.errors import InsufficientSamples


def blob_features(seed, n_per_class, centers, dim=4, spread=0.5):
    rng = np.random.default_rng(seed)
    rows, labels, pools = [], [], []
    for c, center in enumerate(centers):
        pool = []
        for _ in range(n_per_class):
            pool.append(len(rows))
            rows.append(rng.normal(center, spread, dim))
            labels.append(c)
        pools.append(np.array(pool))
    return np.vstack(rows), np.array(labels), pools


def test_single_trial_has_zero_std():
    x, y, pools = blob_features(0, 40, [(-2), 2])
    report = run_feature_trials(x, y, pools, TrainConfig(seed=3), 1, 20, 10)
    assert report.std == 0.0
    assert report.mean == report.per_trial_accuracy[0]


def test_mean_is_average_and_confusion_rows_sum():
    x, y, pools = blob_features(1, 60, [(-2), 0, 2])
    report = run_feature_trials(x, y, pools, TrainConfig(seed=4), 3, 30, 15)
    assert np.isclose(report.mean, np.mean(report.per_trial_accuracy))
    assert report.confusion.sum(axis=1).tolist() == [15 * 3] * 3


def test_deterministic_report():
    x, y, pools = blob_features(2, 50, [(-1), 1])
    a = run_feature_trials(x, y, pools, TrainConfig(seed=5), 3, 25, 10)
    b = run_feature_trials(x, y, pools, TrainConfig(seed=5), 3, 25, 10)
    assert a.per_trial_accuracy == b.per_trial_accuracy
    assert np.array_equal(a.confusion, b.confusion)


def test_insufficient_pool_rejected():
    x, y, pools = blob_features(3, 10, [(-1), 1])
    with pytest.raises(InsufficientSamples):
        run_feature_trials(x, y, pools, TrainConfig(seed=6), 1, 9, 2)


def test_separable_blobs_reach_high_accuracy():
    x, y, pools = blob_features(4, 80, [(-3), 3])
    report = run_feature_trials(x, y, pools, TrainConfig(seed=7), 3, 50, 30)
    assert report.mean >= 0.99


def test_color_separated_manifests_mean_rgb(color_manifests):
    report = run_trials(
        color_manifests, None, FeatureSpec(kind="mean_rgb"),
        TrainConfig(seed=11), n_trials=3, n_train=200, n_val=60,
    )
    assert report.mean >= 0.95


def test_identical_distributions_stay_at_chance(chance_manifests):
    report = run_trials(
        chance_manifests, None, FeatureSpec(kind="mean_rgb"),
        TrainConfig(seed=19), n_trials=3, n_train=150, n_val=150,
    )
    assert abs(report.mean - 0.5) <= 0.05


def test_sweep_single_value_and_repeatability(layout_manifests):
    base = {"transform": "patch_shuffle", "mode": "random", "seed": 99}
    rows = sweep(
        layout_manifests, "patch_size", [16, 16], base,
        FeatureSpec(kind="raw_pixels", side=16),
        TrainConfig(seed=13), n_trials=1, n_train=80, n_val=40,
    )
    assert len(rows) == 2
    assert rows[0][1].per_trial_accuracy == rows[1][1].per_trial_accuracy


def test_sweep_unknown_axis_rejected(layout_manifests):
    with pytest.raises(ValueError):
        sweep(layout_manifests, "bogus", [1], {}, FeatureSpec(), TrainConfig(seed=0), 1, 5, 2)


def test_pseudo_dataset_insufficient_size(homogeneous_manifest):
    with pytest.raises(InsufficientSamples):
        pseudo_dataset_check(
            homogeneous_manifest, 3, [2000], TrainConfig(seed=1),
            FeatureSpec(kind="raw_pixels", side=8),
        )


def test_pseudo_dataset_memorization_regime(homogeneous_manifest):
    # high-capacity features, tiny pseudo-datasets: train accuracy saturates
    # while validation stays near chance
    rows = pseudo_dataset_check(
        homogeneous_manifest, 2, [40], TrainConfig(seed=21, epochs=200),
        FeatureSpec(kind="raw_pixels", side=16, normalize=True),
        val_fraction=0.25,
    )
    (size, train_acc, val_acc), = rows
    assert size == 40
    assert train_acc >= 0.95
    assert val_acc <= 0.8
