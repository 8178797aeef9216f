"""Canny edge detection: blur, Sobel gradients, NMS, hysteresis.

Output is strictly binary {0, 255}.  Gradient magnitudes are min-max scaled
per image to [0, 255] before double thresholding, so the thresholds live on
the same scale as 8-bit intensities regardless of image contrast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ImageTooSmall
from ..images import ImageBuffer
from .color import grayscale_f64

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = _SOBEL_X.T


@dataclass(frozen=True)
class CannySpec:
    sigma: float = 1.4
    low_threshold: float = 100.0
    high_threshold: float = 200.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if not 0 <= self.low_threshold <= self.high_threshold:
            raise ValueError("need 0 <= low_threshold <= high_threshold")


def gaussian_blur(gray: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian, kernel truncated at 2*sigma each side.

    Near the borders the kernel taps falling outside the image are dropped
    and the remaining weights renormalized, so constant regions stay constant.
    """
    radius = max(int(2.0 * sigma), 1)
    taps = np.exp(-np.arange(-radius, radius + 1) ** 2 / (2.0 * sigma**2))
    ones = np.ones_like(gray)
    out = gray
    for axis in (0, 1):
        out = ndimage.correlate1d(out, taps, axis=axis, mode="constant", cval=0.0)
        norm = ndimage.correlate1d(ones, taps, axis=axis, mode="constant", cval=0.0)
        out = out / norm
    return out


def sobel_gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gx = ndimage.correlate(gray, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(gray, _SOBEL_Y, mode="nearest")
    return gx, gy


def _shifted(arr: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """arr sampled at (y+dy, x+dx), zero outside the image."""
    out = np.zeros_like(arr)
    h, w = arr.shape
    ys = slice(max(dy, 0), h + min(dy, 0))
    xs = slice(max(dx, 0), w + min(dx, 0))
    yd = slice(max(-dy, 0), h + min(-dy, 0))
    xd = slice(max(-dx, 0), w + min(-dx, 0))
    out[yd, xd] = arr[ys, xs]
    return out


def non_maximum_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Keep pixels that are maximal along their quantized gradient direction.

    Four sectors (0, 45, 90, 135 degrees).  The comparison is strict against
    the lower-coordinate neighbor and non-strict against the other, so a
    two-pixel plateau keeps exactly one pixel (a single-pixel-wide line on a
    symmetric step edge).  Border pixels are suppressed.
    """
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    sector = np.zeros(mag.shape, dtype=np.int8)
    sector[(angle >= 22.5) & (angle < 67.5)] = 1
    sector[(angle >= 67.5) & (angle < 112.5)] = 2
    sector[(angle >= 112.5) & (angle < 157.5)] = 3

    # (prev, next) neighbor offsets per sector; prev has the smaller y (or x)
    offsets = {0: ((0, -1), (0, 1)), 1: ((-1, -1), (1, 1)),
               2: ((-1, 0), (1, 0)), 3: ((-1, 1), (1, -1))}
    keep = np.zeros(mag.shape, dtype=bool)
    for s, ((py, px), (ny, nx)) in offsets.items():
        prev_mag = _shifted(mag, py, px)
        next_mag = _shifted(mag, ny, nx)
        keep |= (sector == s) & (mag > prev_mag) & (mag >= next_mag)
    keep &= mag > 0
    keep[0, :] = keep[-1, :] = False
    keep[:, 0] = keep[:, -1] = False
    return np.where(keep, mag, 0.0)


def canny(img: ImageBuffer, spec: CannySpec = CannySpec()) -> ImageBuffer:
    """Full pipeline; 255 marks edge pixels, 0 everything else."""
    if min(img.height, img.width) < 3:
        raise ImageTooSmall(
            f"canny needs min side >= 3, got {img.height}x{img.width}"
        )
    gray = grayscale_f64(img)
    blurred = gaussian_blur(gray, spec.sigma)
    gx, gy = sobel_gradients(blurred)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    # an (almost) constant image has only float round-off gradients; min-max
    # scaling must not blow those up to full range
    if peak <= 1e-6:
        return ImageBuffer(np.zeros((img.height, img.width, 1), dtype=np.uint8))
    mag = mag / peak * 255.0
    thinned = non_maximum_suppression(mag, gx, gy)

    strong = thinned >= spec.high_threshold
    candidate = thinned >= spec.low_threshold
    if spec.low_threshold == 0:
        candidate &= thinned > 0
    # hysteresis: keep candidate components (8-connected) that touch a strong pixel
    labels, n = ndimage.label(candidate, structure=np.ones((3, 3), dtype=int))
    edges = np.zeros(thinned.shape, dtype=bool)
    if n > 0 and strong.any():
        strong_labels = np.unique(labels[strong])
        strong_labels = strong_labels[strong_labels > 0]
        edges = np.isin(labels, strong_labels)
    out = np.where(edges, 255, 0).astype(np.uint8)
    return ImageBuffer(out[:, :, np.newaxis])
