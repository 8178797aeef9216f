"""Object-level semantic bias analytics.

Everything here is exact counting over binary presence data: distribution
shares, diversity histograms, coefficient rankings, and the parameter-free
majority-share decision rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingAnnotation,
    UnknownClass,
    VocabularyMismatch,
)
from .classify.softmax import SoftmaxModel


@dataclass(frozen=True)
class PresenceMatrix:
    """Binary image x class matrix with aligned dataset labels."""

    matrix: np.ndarray = field(repr=False)  # (N, V) uint8
    dataset_labels: np.ndarray = field(repr=False)  # (N,) in [0, K)
    vocab: tuple[str, ...]
    dataset_names: tuple[str, ...]

    @property
    def n_datasets(self) -> int:
        return len(self.dataset_names)


def build_presence(manifests, vocab) -> PresenceMatrix:
    """Deduplicated presence vectors: a class counts once per image."""
    vocab = tuple(vocab)
    index = {name: i for i, name in enumerate(vocab)}
    rows, labels = [], []
    for mi, manifest in enumerate(manifests):
        for sample in manifest.samples:
            if sample.object_classes is None:
                raise MissingAnnotation(
                    f"{manifest.name}/{sample.id}: no object annotations"
                )
            row = np.zeros(len(vocab), dtype=np.uint8)
            for name in sample.object_classes:
                if name not in index:
                    raise UnknownClass(
                        f"{manifest.name}/{sample.id}: class {name!r} not in vocabulary"
                    )
                row[index[name]] = 1
            rows.append(row)
            labels.append(mi)
    return PresenceMatrix(
        matrix=np.array(rows, dtype=np.uint8),
        dataset_labels=np.array(labels, dtype=np.int64),
        vocab=vocab,
        dataset_names=tuple(m.name for m in manifests),
    )


@dataclass(frozen=True)
class ClassShareTable:
    vocab: tuple[str, ...]
    counts: np.ndarray = field(repr=False)  # (V, K) images per dataset
    support: np.ndarray = field(repr=False)  # (V,) images containing class
    shares: np.ndarray = field(repr=False)  # (V, K); zero row when support 0
    min_support: int

    def top_classes(self, dataset: int, k: int) -> list[tuple[str, float, int]]:
        """Top-k (name, share, support) for one dataset.

        Classes under min_support are excluded; ranking is by share
        descending, then higher support, then class index.
        """
        eligible = np.nonzero(self.support >= self.min_support)[0]
        order = sorted(
            eligible,
            key=lambda c: (-self.shares[c, dataset], -self.support[c], c),
        )
        return [
            (self.vocab[c], float(self.shares[c, dataset]), int(self.support[c]))
            for c in order[:k]
        ]


def class_shares(pm: PresenceMatrix, min_support: int = 20) -> ClassShareTable:
    """Per-class dataset shares: count / total images containing the class."""
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    k = pm.n_datasets
    counts = np.zeros((len(pm.vocab), k), dtype=np.int64)
    for d in range(k):
        counts[:, d] = pm.matrix[pm.dataset_labels == d].sum(axis=0)
    support = counts.sum(axis=1)
    shares = np.zeros_like(counts, dtype=np.float64)
    nonzero = support > 0
    shares[nonzero] = counts[nonzero] / support[nonzero, np.newaxis]
    return ClassShareTable(
        vocab=pm.vocab, counts=counts, support=support,
        shares=shares, min_support=min_support,
    )


def unique_object_stats(pm: PresenceMatrix):
    """Per-dataset histogram of unique-object counts per image, plus means.

    Returns (histograms, means): histograms[d] is a vector over counts
    0..max, means[d] the average count.
    """
    row_sums = pm.matrix.sum(axis=1).astype(np.int64)
    max_count = int(row_sums.max()) if row_sums.size else 0
    histograms, means = [], []
    for d in range(pm.n_datasets):
        mine = row_sums[pm.dataset_labels == d]
        histograms.append(np.bincount(mine, minlength=max_count + 1))
        means.append(float(mine.mean()) if mine.size else 0.0)
    return histograms, means


def rank_classes_by_coefficients(
    model: SoftmaxModel, pm: PresenceMatrix, min_frequency: int = 20
) -> list[list[tuple[str, float]]]:
    """Per-dataset class ranking by regression weight, rare classes dropped."""
    if model.n_features != len(pm.vocab):
        raise VocabularyMismatch(
            f"model has {model.n_features} features, vocabulary has {len(pm.vocab)}"
        )
    support = pm.matrix.sum(axis=0).astype(np.int64)
    eligible = np.nonzero(support >= min_frequency)[0]
    rankings = []
    for d in range(model.n_classes):
        order = sorted(eligible, key=lambda c: (-model.weights[d, c], c))
        rankings.append([(pm.vocab[c], float(model.weights[d, c])) for c in order])
    return rankings


@dataclass(frozen=True)
class MajorityRule:
    """label -> dataset map; ties and unseen labels go to the lowest index."""

    assignment: dict
    n_datasets: int
    fallback: int = 0


def _require_labels(labels):
    out = []
    for i, lab in enumerate(labels):
        if lab is None:
            raise MissingAnnotation(f"sample {i} has no single label")
        out.append(lab)
    return out


def fit_majority_rule(labels, dataset_ids, n_datasets: int) -> MajorityRule:
    """For each label, predict the dataset where it is most frequent."""
    labels = _require_labels(labels)
    counts: dict = {}
    for lab, d in zip(labels, dataset_ids):
        counts.setdefault(lab, np.zeros(n_datasets, dtype=np.int64))[d] += 1
    assignment = {lab: int(np.argmax(c)) for lab, c in counts.items()}
    return MajorityRule(assignment=assignment, n_datasets=n_datasets)


def apply_majority_rule(rule: MajorityRule, labels, dataset_ids=None):
    """Predict datasets for labels; unseen labels fall back and get flagged.

    Returns (predictions, accuracy or None, unseen label list).
    """
    labels = _require_labels(labels)
    unseen = sorted({lab for lab in labels if lab not in rule.assignment})
    preds = np.array(
        [rule.assignment.get(lab, rule.fallback) for lab in labels], dtype=np.int64
    )
    accuracy = None
    if dataset_ids is not None:
        truth = np.asarray(dataset_ids, dtype=np.int64)
        if truth.shape[0] != preds.shape[0]:
            raise DimensionMismatch("labels and dataset ids differ in length")
        accuracy = float((preds == truth).mean()) if preds.size else 0.0
    return preds, accuracy, unseen


def pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    """Plain two-pass Pearson correlation; NaN when either side is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt((dx**2).sum()) * np.sqrt((dy**2).sum())
    if denom == 0.0:
        return float("nan")
    return float((dx * dy).sum() / denom)


@dataclass(frozen=True)
class ShareAccuracyTable:
    labels: tuple
    majority_share: np.ndarray = field(repr=False)
    accuracy: np.ndarray = field(repr=False)
    support: np.ndarray = field(repr=False)
    r: float
    degenerate: bool  # zero variance on either axis


def accuracy_vs_majority_share(
    predictions,
    dataset_ids,
    labels,
    n_datasets: int,
    min_support: int = 1,
) -> ShareAccuracyTable:
    """Correlate per-label majority share with per-label prediction accuracy."""
    predictions = np.asarray(predictions, dtype=np.int64)
    dataset_ids = np.asarray(dataset_ids, dtype=np.int64)
    labels = _require_labels(labels)
    if not (predictions.shape[0] == dataset_ids.shape[0] == len(labels)):
        raise DimensionMismatch("predictions, dataset ids and labels must align")

    by_label: dict = {}
    for i, lab in enumerate(labels):
        by_label.setdefault(lab, []).append(i)

    names, shares, accs, supports = [], [], [], []
    for lab in sorted(by_label, key=str):
        idx = np.array(by_label[lab])
        if idx.size < min_support:
            continue
        counts = np.bincount(dataset_ids[idx], minlength=n_datasets)
        names.append(lab)
        shares.append(counts.max() / idx.size)
        accs.append(float((predictions[idx] == dataset_ids[idx]).mean()))
        supports.append(idx.size)

    shares_arr = np.array(shares)
    accs_arr = np.array(accs)
    r = pearson_r(shares_arr, accs_arr) if len(names) >= 2 else float("nan")
    return ShareAccuracyTable(
        labels=tuple(names),
        majority_share=shares_arr,
        accuracy=accs_arr,
        support=np.array(supports, dtype=np.int64),
        r=r,
        degenerate=bool(np.isnan(r)),
    )
