"""Multinomial logistic regression trained with mini-batch SGD."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, FeatureKindMismatch, NonFiniteLoss
from ..images import ImageBuffer
from ..rng import Rng, fisher_yates
from .features import RAW_PIXELS, FeatureSpec


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 64
    learning_rate: float = 0.1
    weight_decay: float = 1e-4
    label_smoothing: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0 <= self.label_smoothing < 1:
            raise ValueError("label_smoothing must be in [0, 1)")


@dataclass(frozen=True)
class SoftmaxModel:
    weights: np.ndarray = field(repr=False)  # (K, D)
    bias: np.ndarray = field(repr=False)  # (K,)
    class_names: tuple[str, ...]
    feature_spec: FeatureSpec | None = None

    def __post_init__(self):
        if self.weights.shape[0] < 2:
            raise ValueError("need at least 2 classes")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValueError("model parameters must be finite")

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shift-stabilized."""
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def smoothed_targets(labels: np.ndarray, k: int, smoothing: float) -> np.ndarray:
    t = np.full((labels.shape[0], k), smoothing / k)
    t[np.arange(labels.shape[0]), labels] += 1.0 - smoothing
    return t


def loss_and_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    x: np.ndarray,
    labels: np.ndarray,
    weight_decay: float,
    label_smoothing: float,
):
    """Mean smoothed cross-entropy plus (weight_decay/2)*||W||^2.

    Returns (loss, grad_weights, grad_bias); the analytic gradient here is
    what the finite-difference acceptance check certifies.
    """
    n, k = x.shape[0], weights.shape[0]
    # divergence shows up as inf/nan in the loss and is reported by train();
    # silence the intermediate overflow instead of warning about it
    with np.errstate(over="ignore", invalid="ignore"):
        logits = x @ weights.T + bias
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        targets = smoothed_targets(labels, k, label_smoothing)
        data_loss = -(targets * log_probs).sum() / n
        loss = data_loss + 0.5 * weight_decay * float((weights**2).sum())
        dz = (np.exp(log_probs) - targets) / n
        grad_w = dz.T @ x + weight_decay * weights
        grad_b = dz.sum(axis=0)
    return loss, grad_w, grad_b


def train(
    x: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
    class_names=None,
    feature_spec: FeatureSpec | None = None,
    n_classes: int | None = None,
) -> SoftmaxModel:
    """SGD with a constant rate over shuffled mini-batches, seeded by cfg.

    Deterministic for a fixed config: batch order comes from Rng(cfg.seed)
    and parameters start at zero.
    """
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    k = int(n_classes) if n_classes is not None else int(labels.max()) + 1
    if np.unique(labels).size < 2:
        raise ValueError("training needs at least 2 distinct classes")
    n, d = x.shape
    if n < k:
        raise ValueError(f"need at least {k} samples for {k} classes")
    if class_names is None:
        class_names = tuple(str(i) for i in range(k))

    weights = np.zeros((k, d))
    bias = np.zeros(k)
    rng = Rng(cfg.seed, stream="sgd")
    for epoch in range(cfg.epochs):
        order = fisher_yates(n, rng)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, grad_w, grad_b = loss_and_grad(
                weights, bias, x[idx], labels[idx],
                cfg.weight_decay, cfg.label_smoothing,
            )
            if not np.isfinite(loss):
                raise NonFiniteLoss(
                    f"loss diverged at epoch {epoch}; lower the learning rate"
                )
            weights -= cfg.learning_rate * grad_w
            bias -= cfg.learning_rate * grad_b
    return SoftmaxModel(weights=weights, bias=bias,
                        class_names=tuple(class_names), feature_spec=feature_spec)


def predict_logits(model: SoftmaxModel, x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"model expects {model.n_features} features, got {x.shape[1]}"
        )
    return x @ model.weights.T + model.bias


def predict(model: SoftmaxModel, x: np.ndarray) -> np.ndarray:
    """argmax prediction; ties break toward the lower class index."""
    return np.argmax(predict_logits(model, x), axis=1)


def evaluate(model: SoftmaxModel, x: np.ndarray, labels: np.ndarray):
    """(accuracy, KxK confusion matrix with rows = true, cols = predicted)."""
    labels = np.asarray(labels, dtype=np.int64)
    preds = predict(model, x)
    k = model.n_classes
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (labels, preds), 1)
    accuracy = float((preds == labels).mean()) if labels.size else 0.0
    return accuracy, confusion


def linear_saliency(model: SoftmaxModel, features: np.ndarray):
    """Per-pixel evidence margin for a raw-pixels model.

    heat = (w_pred - w_runnerup) * x per feature, summed over channels and
    reshaped to side x side; the sum of the raw map equals the bias-free
    logit margin between the predicted class and the runner-up.

    Returns (heatmap ImageBuffer, raw float map).
    """
    spec = model.feature_spec
    if spec is None or spec.kind != RAW_PIXELS:
        raise FeatureKindMismatch("linear_saliency needs a raw_pixels model")
    x = np.asarray(features, dtype=np.float64).ravel()
    logits = predict_logits(model, x)[0]
    pred = int(np.argmax(logits))
    rest = [c for c in range(model.n_classes) if c != pred]
    runner = rest[int(np.argmax(logits[rest]))]

    per_feature = (model.weights[pred] - model.weights[runner]) * x
    channels = x.size // (spec.side * spec.side)
    raw = per_feature.reshape(spec.side, spec.side, channels).sum(axis=2)

    lo, hi = float(raw.min()), float(raw.max())
    if hi - lo < 1e-12:
        scaled = np.zeros_like(raw)
    else:
        scaled = (raw - lo) / (hi - lo) * 255.0
    heat = ImageBuffer(np.floor(scaled + 0.5).astype(np.uint8)[:, :, np.newaxis])
    return heat, raw
