"""Featurization of raw, transformed, or annotated samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FeatureKindMismatch, MissingAnnotation, UnknownClass
from ..images import ImageBuffer, load_image
from ..manifest import Sample

RAW_PIXELS = "raw_pixels"
MEAN_RGB = "mean_rgb"
HOG = "hog"
BAG_OF_OBJECTS = "bag_of_objects"
BAG_OF_WORDS = "bag_of_words"

_IMAGE_KINDS = (RAW_PIXELS, MEAN_RGB, HOG)


@dataclass(frozen=True)
class FeatureSpec:
    kind: str = RAW_PIXELS
    side: int = 64
    cell: int = 8
    bins: int = 9
    vocab_size: int = 1000
    normalize: bool = False

    def __post_init__(self):
        if self.kind not in (_IMAGE_KINDS + (BAG_OF_OBJECTS, BAG_OF_WORDS)):
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.kind == RAW_PIXELS and self.side < 2:
            raise ValueError("raw_pixels side must be >= 2")

    @property
    def needs_images(self) -> bool:
        return self.kind in _IMAGE_KINDS


def resize_bilinear(pixels: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resampling with half-pixel-aligned centers, edge clamped.

    Source coordinate of output pixel i is (i + 0.5) * (in / out) - 0.5.
    Returns float64 of shape (out_h, out_w, C).
    """
    arr = pixels.astype(np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    in_h, in_w = arr.shape[:2]

    def axis_coords(n_out, n_in):
        src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        src = np.clip(src, 0.0, n_in - 1.0)
        lo = np.floor(src).astype(int)
        hi = np.minimum(lo + 1, n_in - 1)
        return lo, hi, (src - lo)

    y0, y1, fy = axis_coords(out_h, in_h)
    x0, x1, fx = axis_coords(out_w, in_w)
    fy = fy[:, np.newaxis, np.newaxis]
    fx = fx[np.newaxis, :, np.newaxis]
    top = arr[y0][:, x0] * (1 - fx) + arr[y0][:, x1] * fx
    bot = arr[y1][:, x0] * (1 - fx) + arr[y1][:, x1] * fx
    return top * (1 - fy) + bot * fy


def bag_of_objects_vector(sample: Sample, vocab) -> np.ndarray:
    if sample.object_classes is None:
        raise MissingAnnotation(f"sample {sample.id!r} has no object annotations")
    index = {name: i for i, name in enumerate(vocab)}
    vec = np.zeros(len(vocab))
    for name in sample.object_classes:
        if name not in index:
            raise UnknownClass(f"object class {name!r} not in vocabulary")
        vec[index[name]] = 1.0
    return vec


def bag_of_words_vector(tokens, vocab_index: dict) -> np.ndarray:
    """L2-normalized token counts over a fixed vocabulary."""
    vec = np.zeros(len(vocab_index))
    for tok in tokens:
        idx = vocab_index.get(tok)
        if idx is not None:
            vec[idx] += 1.0
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def extract_features(
    source,
    spec: FeatureSpec,
    vocab=None,
    caption_field: str = "short",
) -> np.ndarray:
    """Turn one sample (or image) into a real-valued feature vector.

    Image kinds take an ImageBuffer (or a raw HxWxC array from channel
    concatenation); annotation kinds take a Sample plus the vocabulary.
    """
    if spec.kind == RAW_PIXELS:
        if isinstance(source, ImageBuffer):
            arr = source.pixels
        elif isinstance(source, np.ndarray):
            arr = source
        else:
            raise FeatureKindMismatch("raw_pixels needs an image")
        resized = resize_bilinear(arr, spec.side, spec.side)
        return resized.ravel() / 255.0
    if spec.kind == MEAN_RGB:
        if not isinstance(source, ImageBuffer):
            raise FeatureKindMismatch("mean_rgb needs an ImageBuffer")
        from ..transforms.color import mean_rgb

        _, means = mean_rgb(source)
        return np.array(means) / 255.0
    if spec.kind == HOG:
        if not isinstance(source, ImageBuffer):
            raise FeatureKindMismatch("hog needs an ImageBuffer")
        from ..transforms.color import grayscale_f64
        from ..transforms.hog import hog_features

        return hog_features(grayscale_f64(source), spec.cell, spec.bins)
    if spec.kind == BAG_OF_OBJECTS:
        if not isinstance(source, Sample):
            raise FeatureKindMismatch("bag_of_objects needs a Sample")
        if vocab is None:
            raise ValueError("bag_of_objects needs a vocabulary")
        return bag_of_objects_vector(source, vocab)
    if spec.kind == BAG_OF_WORDS:
        if not isinstance(source, Sample):
            raise FeatureKindMismatch("bag_of_words needs a Sample")
        if vocab is None:
            raise ValueError("bag_of_words needs a vocabulary")
        text = source.caption(caption_field)
        if text is None:
            raise MissingAnnotation(f"sample {sample_id(source)} has no caption")
        from ..text.tokens import tokenize

        index = vocab if isinstance(vocab, dict) else {t: i for i, t in enumerate(vocab)}
        return bag_of_words_vector(tokenize(text), index)
    raise FeatureKindMismatch(f"unhandled kind {spec.kind!r}")


def sample_id(source) -> str:
    return getattr(source, "id", "<image>")


def featurize_manifests(
    manifests,
    transform,
    spec: FeatureSpec,
    vocab=None,
    caption_field: str = "short",
):
    """Feature matrix over all samples of all manifests.

    Returns (X, labels, pools) where pools[m] lists the row indices that
    belong to manifest m.  The transform (if any) runs on the decoded image
    before featurization and may yield a multi-channel array (concat).
    """
    rows, labels, pools = [], [], []
    for mi, manifest in enumerate(manifests):
        pool = []
        for sample in manifest.samples:
            if spec.needs_images:
                img = load_image(sample.image_path)
                if transform is not None:
                    img = transform(img, sample.id)
                vec = extract_features(img, spec, vocab, caption_field)
            else:
                vec = extract_features(sample, spec, vocab, caption_field)
            pool.append(len(rows))
            rows.append(vec)
            labels.append(mi)
        pools.append(np.array(pool, dtype=np.int64))
    return np.vstack(rows), np.array(labels, dtype=np.int64), pools
