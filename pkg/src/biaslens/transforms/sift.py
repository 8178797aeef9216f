"""Difference-of-Gaussian keypoint detection and circle rendering.

Detection and orientation assignment only; descriptors are out of scope.
The image is scaled to [0, 1] internally, so the contrast threshold is
expressed on that scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ImageTooSmall
from ..images import ImageBuffer
from .color import grayscale_f64

DEFAULT_OCTAVES = 3
DEFAULT_SCALES_PER_OCTAVE = 3
DEFAULT_BASE_SIGMA = 1.6
DEFAULT_CONTRAST_THRESHOLD = 0.03
DEFAULT_EDGE_RATIO = 10.0
_ORI_BINS = 36


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    scale: float
    orientation: float  # radians in [0, 2*pi)


@dataclass(frozen=True)
class RawDetection:
    """Internal detection record, kept for post-hoc verification."""

    octave: int
    level: int  # DoG level index
    iy: int
    ix: int
    dog_value: float
    edge_score: float  # tr^2 / det of the 2x2 spatial Hessian
    y: float  # refined, base-image coordinates
    x: float
    sigma: float  # absolute scale in base-image pixels


def gaussian_pyramid(
    gray01: np.ndarray,
    octaves: int = DEFAULT_OCTAVES,
    scales: int = DEFAULT_SCALES_PER_OCTAVE,
    base_sigma: float = DEFAULT_BASE_SIGMA,
) -> list[list[np.ndarray]]:
    """scales + 3 Gaussian levels per octave, sigma growing by 2^(1/scales)."""
    k = 2.0 ** (1.0 / scales)
    sigmas = [base_sigma * k**i for i in range(scales + 3)]
    pyramid = []
    current = ndimage.gaussian_filter(gray01, base_sigma)
    for _ in range(octaves):
        levels = [current]
        for i in range(1, scales + 3):
            inc = np.sqrt(sigmas[i] ** 2 - sigmas[i - 1] ** 2)
            levels.append(ndimage.gaussian_filter(levels[-1], inc))
        pyramid.append(levels)
        current = levels[scales][::2, ::2]
    return pyramid


def dog_pyramid(gauss: list[list[np.ndarray]]) -> list[list[np.ndarray]]:
    return [
        [levels[i + 1] - levels[i] for i in range(len(levels) - 1)]
        for levels in gauss
    ]


def _refine(stack: np.ndarray, lvl: int, iy: int, ix: int):
    """One quadratic (Taylor) step around a discrete extremum.

    Returns the (d_level, dy, dx) offset, clamped to [-1, 1] per axis; a
    non-invertible Hessian yields a zero offset.
    """
    d = stack
    g = np.array([
        (d[lvl + 1, iy, ix] - d[lvl - 1, iy, ix]) / 2.0,
        (d[lvl, iy + 1, ix] - d[lvl, iy - 1, ix]) / 2.0,
        (d[lvl, iy, ix + 1] - d[lvl, iy, ix - 1]) / 2.0,
    ])
    c = d[lvl, iy, ix]
    hss = d[lvl + 1, iy, ix] + d[lvl - 1, iy, ix] - 2 * c
    hyy = d[lvl, iy + 1, ix] + d[lvl, iy - 1, ix] - 2 * c
    hxx = d[lvl, iy, ix + 1] + d[lvl, iy, ix - 1] - 2 * c
    hsy = (d[lvl + 1, iy + 1, ix] - d[lvl + 1, iy - 1, ix]
           - d[lvl - 1, iy + 1, ix] + d[lvl - 1, iy - 1, ix]) / 4.0
    hsx = (d[lvl + 1, iy, ix + 1] - d[lvl + 1, iy, ix - 1]
           - d[lvl - 1, iy, ix + 1] + d[lvl - 1, iy, ix - 1]) / 4.0
    hyx = (d[lvl, iy + 1, ix + 1] - d[lvl, iy + 1, ix - 1]
           - d[lvl, iy - 1, ix + 1] + d[lvl, iy - 1, ix - 1]) / 4.0
    hessian = np.array([[hss, hsy, hsx], [hsy, hyy, hyx], [hsx, hyx, hxx]])
    try:
        offset = -np.linalg.solve(hessian, g)
    except np.linalg.LinAlgError:
        return 0.0, 0.0, 0.0
    offset = np.clip(offset, -1.0, 1.0)
    return float(offset[0]), float(offset[1]), float(offset[2])


def detect_keypoints(
    gray01: np.ndarray,
    octaves: int = DEFAULT_OCTAVES,
    scales: int = DEFAULT_SCALES_PER_OCTAVE,
    base_sigma: float = DEFAULT_BASE_SIGMA,
    contrast_threshold: float = DEFAULT_CONTRAST_THRESHOLD,
    edge_ratio: float = DEFAULT_EDGE_RATIO,
) -> tuple[list[RawDetection], list[list[np.ndarray]]]:
    """26-neighborhood DoG extrema with contrast and edge-ratio tests.

    Returns the detections plus the Gaussian pyramid (reused for orientation).
    """
    gauss = gaussian_pyramid(gray01, octaves, scales, base_sigma)
    dogs = dog_pyramid(gauss)
    k = 2.0 ** (1.0 / scales)
    edge_bound = (edge_ratio + 1.0) ** 2 / edge_ratio

    detections = []
    for o, levels in enumerate(dogs):
        stack = np.stack(levels)  # (n_levels, h, w)
        footprint = np.ones((3, 3, 3), dtype=bool)
        local_max = ndimage.maximum_filter(stack, footprint=footprint, mode="constant", cval=-np.inf)
        local_min = ndimage.minimum_filter(stack, footprint=footprint, mode="constant", cval=np.inf)
        is_ext = ((stack == local_max) | (stack == local_min))
        is_ext &= np.abs(stack) > contrast_threshold
        is_ext[0, :, :] = is_ext[-1, :, :] = False
        is_ext[:, 0, :] = is_ext[:, -1, :] = False
        is_ext[:, :, 0] = is_ext[:, :, -1] = False
        for lvl, iy, ix in zip(*np.nonzero(is_ext)):
            c = stack[lvl, iy, ix]
            hyy = stack[lvl, iy + 1, ix] + stack[lvl, iy - 1, ix] - 2 * c
            hxx = stack[lvl, iy, ix + 1] + stack[lvl, iy, ix - 1] - 2 * c
            hyx = (stack[lvl, iy + 1, ix + 1] - stack[lvl, iy + 1, ix - 1]
                   - stack[lvl, iy - 1, ix + 1] + stack[lvl, iy - 1, ix - 1]) / 4.0
            det = hxx * hyy - hyx**2
            if det <= 0:
                continue
            edge_score = (hxx + hyy) ** 2 / det
            if edge_score >= edge_bound:
                continue
            ds, dy, dx = _refine(stack, int(lvl), int(iy), int(ix))
            scale_unit = 2.0**o
            sigma = base_sigma * k ** (float(lvl) + ds) * scale_unit
            detections.append(RawDetection(
                octave=o, level=int(lvl), iy=int(iy), ix=int(ix),
                dog_value=float(c), edge_score=float(edge_score),
                y=(iy + dy) * scale_unit, x=(ix + dx) * scale_unit,
                sigma=float(sigma),
            ))
    return detections, gauss


def _orientation(gauss_level: np.ndarray, iy: int, ix: int, sigma_level: float) -> float:
    """Peak of a Gaussian-weighted 36-bin gradient orientation histogram."""
    h, w = gauss_level.shape
    sigma_ori = 1.5 * sigma_level
    radius = max(int(round(3.0 * sigma_ori)), 1)
    hist = np.zeros(_ORI_BINS)
    for oy in range(-radius, radius + 1):
        y = iy + oy
        if y < 1 or y >= h - 1:
            continue
        for ox in range(-radius, radius + 1):
            x = ix + ox
            if x < 1 or x >= w - 1:
                continue
            dx = (gauss_level[y, x + 1] - gauss_level[y, x - 1]) / 2.0
            dy = (gauss_level[y + 1, x] - gauss_level[y - 1, x]) / 2.0
            mag = np.hypot(dx, dy)
            if mag == 0:
                continue
            weight = np.exp(-(oy**2 + ox**2) / (2.0 * sigma_ori**2))
            theta = np.arctan2(dy, dx) % (2.0 * np.pi)
            b = int(theta / (2.0 * np.pi) * _ORI_BINS) % _ORI_BINS
            hist[b] += weight * mag
    peak = int(np.argmax(hist))
    return (peak + 0.5) * 2.0 * np.pi / _ORI_BINS % (2.0 * np.pi)


def _draw_circle(canvas: np.ndarray, y0: float, x0: float, radius: float, color) -> None:
    steps = max(int(2 * np.pi * radius * 2), 8)
    for t in range(steps):
        theta = 2 * np.pi * t / steps
        y = int(round(y0 + radius * np.sin(theta)))
        x = int(round(x0 + radius * np.cos(theta)))
        if 0 <= y < canvas.shape[0] and 0 <= x < canvas.shape[1]:
            canvas[y, x] = color


def _draw_tick(canvas: np.ndarray, y0: float, x0: float, radius: float,
               theta: float, color) -> None:
    for t in np.arange(0, radius + 0.25, 0.5):
        y = int(round(y0 + t * np.sin(theta)))
        x = int(round(x0 + t * np.cos(theta)))
        if 0 <= y < canvas.shape[0] and 0 <= x < canvas.shape[1]:
            canvas[y, x] = color


def sift_keypoints(img: ImageBuffer, **kwargs) -> tuple[list[Keypoint], ImageBuffer]:
    """Detect keypoints and render them as circles with orientation ticks.

    Keyword arguments mirror detect_keypoints.  Keypoints outside the image
    after refinement are dropped.
    """
    if min(img.height, img.width) < 16:
        raise ImageTooSmall(
            f"sift needs min side >= 16, got {img.height}x{img.width}"
        )
    gray01 = grayscale_f64(img) / 255.0
    detections, gauss = detect_keypoints(gray01, **kwargs)

    keypoints = []
    for det in detections:
        if not (0 <= det.y < img.height and 0 <= det.x < img.width):
            continue
        level_img = gauss[det.octave][det.level]
        sigma_level = det.sigma / 2.0**det.octave
        theta = _orientation(level_img, det.iy, det.ix, sigma_level)
        keypoints.append(Keypoint(x=det.x, y=det.y, scale=det.sigma, orientation=theta))

    if img.channels == 1:
        canvas = np.repeat(img.pixels, 3, axis=2).astype(np.float64)
    else:
        canvas = img.as_float()
    color = np.array([255.0, 64.0, 64.0])
    for kp in keypoints:
        _draw_circle(canvas, kp.y, kp.x, kp.scale, color)
        _draw_tick(canvas, kp.y, kp.x, kp.scale, kp.orientation, color)
    rendered = ImageBuffer(np.floor(canvas + 0.5).astype(np.uint8))
    return keypoints, rendered
