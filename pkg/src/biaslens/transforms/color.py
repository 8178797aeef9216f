"""Grayscale conversion and per-image color averaging."""

from __future__ import annotations

import numpy as np

from ..images import ImageBuffer

# ITU-R 601 luma coefficients
_LUMA = np.array([0.299, 0.587, 0.114])


def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    """Luma = round(0.299 R + 0.587 G + 0.114 B); grayscale passes through."""
    if img.channels == 1:
        return img
    luma = img.as_float() @ _LUMA
    out = np.floor(np.clip(luma, 0.0, 255.0) + 0.5).astype(np.uint8)
    return ImageBuffer(out[:, :, np.newaxis])


def grayscale_f64(img: ImageBuffer) -> np.ndarray:
    """2-D float64 view of the 8-bit luma (quantized like to_grayscale)."""
    return to_grayscale(img).pixels[:, :, 0].astype(np.float64)


def mean_rgb(img: ImageBuffer) -> tuple[ImageBuffer, tuple[float, ...]]:
    """Replace every pixel with the per-channel arithmetic mean.

    Returns the constant image (means rounded half up) plus the exact means.
    Summation runs in 64-bit integers, so the means are exact.
    """
    if img.channels != 3:
        raise ValueError("mean_rgb needs a 3-channel image")
    px = img.pixels.astype(np.int64)
    n = img.height * img.width
    sums = px.sum(axis=(0, 1))
    means = tuple(float(s) / n for s in sums)
    rounded = np.floor(np.array(means) + 0.5).astype(np.uint8)
    out = np.broadcast_to(rounded, img.pixels.shape).copy()
    return ImageBuffer(out), means
