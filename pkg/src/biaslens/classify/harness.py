"""Repeated-trial dataset-origin classification, sweeps, memorization check."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from ..errors import InsufficientSamples
from ..rng import Rng, fisher_yates
from ..sampling import split_pool
from ..transforms import build_transform
from .features import FeatureSpec, featurize_manifests
from .softmax import TrainConfig, evaluate, train


@dataclass(frozen=True)
class TrialReport:
    per_trial_accuracy: tuple[float, ...]
    mean: float
    std: float  # population std over trials
    confusion: np.ndarray = field(repr=False)  # (K, K), summed over trials
    class_names: tuple[str, ...] = ()
    config_echo: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_trial_accuracy": list(self.per_trial_accuracy),
            "mean": self.mean,
            "std": self.std,
            "confusion": self.confusion.tolist(),
            "class_names": list(self.class_names),
            "config": self.config_echo,
        }


def _aggregate(accuracies, confusion, class_names, config_echo) -> TrialReport:
    acc = np.array(accuracies, dtype=np.float64)
    return TrialReport(
        per_trial_accuracy=tuple(float(a) for a in acc),
        mean=float(acc.mean()),
        std=float(acc.std()),
        confusion=confusion,
        class_names=tuple(class_names),
        config_echo=dict(config_echo),
    )


def standardize(train_x: np.ndarray, other_x: np.ndarray):
    """Per-feature standardization with train-split statistics only."""
    mu = train_x.mean(axis=0)
    sd = train_x.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (train_x - mu) / sd, (other_x - mu) / sd


def run_feature_trials(
    x: np.ndarray,
    labels: np.ndarray,
    pools,
    cfg: TrainConfig,
    n_trials: int,
    n_train: int,
    n_val: int,
    normalize: bool = False,
    class_names=None,
    config_echo: dict | None = None,
) -> TrialReport:
    """Trial loop over a precomputed feature matrix.

    Trial t draws its split with seed cfg.seed + t (one independent draw per
    class pool) and trains with that same seed, mirroring the repeated
    sampling protocol.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    k = len(pools)
    if class_names is None:
        class_names = tuple(str(i) for i in range(k))
    for mi, pool in enumerate(pools):
        if len(pool) < n_train + n_val:
            raise InsufficientSamples(
                f"{class_names[mi]}: has {len(pool)} samples, "
                f"need {n_train + n_val}"
            )
    accuracies = []
    confusion = np.zeros((k, k), dtype=np.int64)
    for t in range(n_trials):
        trial_seed = cfg.seed + t
        train_idx, val_idx = [], []
        for mi, pool in enumerate(pools):
            rng = Rng(trial_seed, stream=f"split:{mi}")
            tr, va = split_pool(len(pool), n_train, n_val, rng)
            train_idx.append(pool[tr])
            val_idx.append(pool[va])
        train_rows = np.concatenate(train_idx)
        val_rows = np.concatenate(val_idx)
        x_train, y_train = x[train_rows], labels[train_rows]
        x_val, y_val = x[val_rows], labels[val_rows]
        if normalize:
            x_train, x_val = standardize(x_train, x_val)
        model = train(
            x_train, y_train, dataclasses.replace(cfg, seed=trial_seed),
            class_names=class_names, n_classes=k,
        )
        acc, conf = evaluate(model, x_val, y_val)
        accuracies.append(acc)
        confusion += conf
    echo = dict(config_echo or {})
    echo.update({
        "n_trials": n_trials, "n_train": n_train, "n_val": n_val,
        "normalize": normalize, "train_config": dataclasses.asdict(cfg),
    })
    return _aggregate(accuracies, confusion, class_names, echo)


def run_trials(
    manifests,
    transform_config,
    feature_spec: FeatureSpec,
    cfg: TrainConfig,
    n_trials: int,
    n_train: int,
    n_val: int,
    vocab=None,
    caption_field: str = "short",
) -> TrialReport:
    """Featurize (optionally through a transform) and run the trial loop.

    Transforms are keyed by sample id and the global transform seed, never by
    the trial index, so each sample is featurized once up front.
    """
    transform = transform_config
    if isinstance(transform_config, dict):
        transform = build_transform(transform_config, default_seed=cfg.seed)
    x, labels, pools = featurize_manifests(
        manifests, transform, feature_spec, vocab, caption_field
    )
    names = tuple(m.name for m in manifests)
    echo = {
        "transform": transform_config if isinstance(transform_config, dict) else None,
        "features": dataclasses.asdict(feature_spec),
    }
    return run_feature_trials(
        x, labels, pools, cfg, n_trials, n_train, n_val,
        normalize=feature_spec.normalize, class_names=names, config_echo=echo,
    )


PATCH_SIZE_AXIS = "patch_size"
FILTER_RADIUS_AXIS = "filter_radius"
_AXIS_KEYS = {PATCH_SIZE_AXIS: "patch", FILTER_RADIUS_AXIS: "radius"}


def sweep(
    manifests,
    axis: str,
    values,
    base_transform: dict,
    feature_spec: FeatureSpec,
    cfg: TrainConfig,
    n_trials: int,
    n_train: int,
    n_val: int,
) -> list[tuple[float, TrialReport]]:
    """run_trials per axis value with otherwise identical config and seeds."""
    if axis not in _AXIS_KEYS:
        raise ValueError(f"unknown sweep axis {axis!r}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    rows = []
    for value in values:
        config = dict(base_transform)
        config[_AXIS_KEYS[axis]] = value
        report = run_trials(
            manifests, config, feature_spec, cfg, n_trials, n_train, n_val
        )
        rows.append((value, report))
    return rows


def pseudo_dataset_check(
    manifest,
    k: int,
    sizes,
    cfg: TrainConfig,
    feature_spec: FeatureSpec,
    transform_config=None,
    val_fraction: float = 0.25,
) -> list[tuple[int, float, float]]:
    """Memorization control: k disjoint pseudo-datasets from one manifest.

    Labels are assigned by the partition and therefore carry no information
    about the features, so validation accuracy should hover at 1/k however
    high the training accuracy climbs.  Each pseudo-dataset holds out
    round(size * val_fraction) samples (at least one) for validation.

    Returns rows of (size, train_accuracy, val_accuracy).
    """
    sizes = list(sizes)
    transform = transform_config
    if isinstance(transform_config, dict):
        transform = build_transform(transform_config, default_seed=cfg.seed)
    x, _, pools = featurize_manifests([manifest], transform, feature_spec)
    n = len(pools[0])
    if k * max(sizes) > n:
        raise InsufficientSamples(
            f"{manifest.name}: has {n} samples, need {k * max(sizes)}"
        )
    rows = []
    for size in sizes:
        n_val = max(1, int(round(size * val_fraction)))
        n_train = size - n_val
        if n_train < 1:
            raise ValueError(f"size {size} leaves no training samples")
        order = fisher_yates(n, Rng(cfg.seed, stream=f"pseudo:{size}"), k=k * size)
        train_rows, train_y, val_rows, val_y = [], [], [], []
        for d in range(k):
            chunk = order[d * size:(d + 1) * size]
            train_rows.append(chunk[:n_train])
            val_rows.append(chunk[n_train:])
            train_y.extend([d] * n_train)
            val_y.extend([d] * n_val)
        x_train = x[np.concatenate(train_rows)]
        x_val = x[np.concatenate(val_rows)]
        y_train = np.array(train_y, dtype=np.int64)
        y_val = np.array(val_y, dtype=np.int64)
        if feature_spec.normalize:
            x_train, x_val = standardize(x_train, x_val)
        model = train(x_train, y_train, cfg, n_classes=k)
        train_acc, _ = evaluate(model, x_train, y_train)
        val_acc, _ = evaluate(model, x_val, y_val)
        rows.append((size, float(train_acc), float(val_acc)))
    return rows
