"""Frequency-domain low/high-pass filtering on grayscaled images.

The transfer function acts on the centered 2-D DFT.  High-pass is defined as
1 - low-pass for both filter kinds, which makes the float-domain identity
low(x) + high(x) = x exact up to FFT round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..images import ImageBuffer
from .color import grayscale_f64

IDEAL = "ideal"
BUTTERWORTH = "butterworth"
LOW_PASS = "low"
HIGH_PASS = "high"


@dataclass(frozen=True)
class FrequencyFilterSpec:
    band: str = LOW_PASS
    kind: str = IDEAL
    radius: float = 40.0
    order: int = 2
    equalize_output: bool = False

    def __post_init__(self):
        if self.band not in (LOW_PASS, HIGH_PASS):
            raise ValueError(f"band must be 'low' or 'high', got {self.band!r}")
        if self.kind not in (IDEAL, BUTTERWORTH):
            raise ValueError(f"kind must be 'ideal' or 'butterworth', got {self.kind!r}")
        if self.radius <= 0:
            raise ValueError("radius must be > 0")
        if self.kind == BUTTERWORTH and self.order < 1:
            raise ValueError("butterworth order must be >= 1")


def centered_distance(height: int, width: int) -> np.ndarray:
    """Euclidean distance of each centered-spectrum bin to the DC bin."""
    cy, cx = height // 2, width // 2
    y = np.arange(height)[:, np.newaxis] - cy
    x = np.arange(width)[np.newaxis, :] - cx
    return np.hypot(y, x)


def transfer_function(height: int, width: int, spec: FrequencyFilterSpec) -> np.ndarray:
    d = centered_distance(height, width)
    if spec.kind == IDEAL:
        low = (d <= spec.radius).astype(np.float64)
    else:
        low = 1.0 / (1.0 + (d / spec.radius) ** (2 * spec.order))
    return low if spec.band == LOW_PASS else 1.0 - low


def filter_float(gray: np.ndarray, spec: FrequencyFilterSpec) -> np.ndarray:
    """Filtered image in float64, before any clamping or normalization."""
    spectrum = np.fft.fftshift(np.fft.fft2(gray))
    spectrum *= transfer_function(*gray.shape, spec)
    return np.real(np.fft.ifft2(np.fft.ifftshift(spectrum)))


def equalize_histogram(gray_u8: np.ndarray) -> np.ndarray:
    """Classic 8-bit histogram equalization."""
    hist = np.bincount(gray_u8.ravel(), minlength=256)
    cdf = np.cumsum(hist)
    nonzero = cdf[cdf > 0]
    if nonzero.size == 0:
        return gray_u8
    cdf_min = nonzero[0]
    total = cdf[-1]
    if total == cdf_min:
        return np.zeros_like(gray_u8)
    table = np.floor((cdf - cdf_min) / (total - cdf_min) * 255.0 + 0.5)
    return np.clip(table, 0, 255).astype(np.uint8)[gray_u8]


def fft_filter(img: ImageBuffer, spec: FrequencyFilterSpec) -> ImageBuffer:
    """Grayscale -> DFT -> transfer function -> inverse DFT -> 8-bit image.

    Low-pass output is clamped to [0, 255] and rounded.  High-pass output is
    min-max scaled to [0, 255] per image (its raw values straddle zero and
    clamping alone would discard the negative half); a numerically constant
    result maps to all zeros, so a constant input still yields a black image.
    With equalize_output the 8-bit result is histogram equalized afterwards
    (visualization exports; classifier inputs keep it off).
    """
    gray = grayscale_f64(img)
    result = filter_float(gray, spec)
    if spec.band == LOW_PASS:
        out = np.floor(np.clip(result, 0.0, 255.0) + 0.5).astype(np.uint8)
    else:
        lo, hi = float(result.min()), float(result.max())
        if hi - lo < 1e-9:
            out = np.zeros(result.shape, dtype=np.uint8)
        else:
            scaled = (result - lo) / (hi - lo) * 255.0
            out = np.floor(scaled + 0.5).astype(np.uint8)
    if spec.equalize_output:
        out = equalize_histogram(out)
    return ImageBuffer(out[:, :, np.newaxis])
