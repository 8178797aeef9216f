"""Deterministic train/validation sampling across manifests."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientSamples
from .manifest import DatasetManifest
from .rng import Rng, fisher_yates


@dataclass(frozen=True)
class Split:
    """Per-manifest train/val index pairs (manifest index, sample index)."""

    train: tuple[tuple[int, int], ...]
    val: tuple[tuple[int, int], ...]
    seed: int


def split_pool(pool_size: int, n_train: int, n_val: int, rng: Rng):
    """Draw n_train + n_val distinct indices from range(pool_size).

    The first n_train go to train, the rest to val.  Uses the shared
    Fisher-Yates shuffle, so the train prefix does not move when n_val grows.
    """
    drawn = fisher_yates(pool_size, rng, k=n_train + n_val)
    return drawn[:n_train], drawn[n_train:]


def sample_split(manifests, n_train: int, n_val: int, seed: int) -> Split:
    """Uniform without-replacement draw of n_train+n_val samples per manifest."""
    train: list[tuple[int, int]] = []
    val: list[tuple[int, int]] = []
    for mi, manifest in enumerate(manifests):
        if isinstance(manifest, DatasetManifest):
            size, label = len(manifest), manifest.name
        else:
            size, label = int(manifest), f"manifest {mi}"
        if size < n_train + n_val:
            raise InsufficientSamples(
                f"{label}: has {size} samples, need {n_train + n_val}"
            )
        rng = Rng(seed, stream=f"split:{mi}")
        tr, va = split_pool(size, n_train, n_val, rng)
        train.extend((mi, int(i)) for i in tr)
        val.extend((mi, int(i)) for i in va)
    return Split(train=tuple(train), val=tuple(val), seed=seed)
