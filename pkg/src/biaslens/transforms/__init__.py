"""Image transformations that isolate single information channels.

Each transform maps ImageBuffer -> ImageBuffer (channel concatenation yields a
raw array instead, for classifier input only).  build_transform turns a plain
config dict — as found in transform spec files — into a callable
``fn(image, sample_id)`` so the classification harness and the CLI share one
dispatch path.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

from ..images import ImageBuffer
from .canny import CannySpec, canny
from .channels import concat_channels
from .color import grayscale_f64, mean_rgb, to_grayscale
from .frequency import (
    BUTTERWORTH,
    HIGH_PASS,
    IDEAL,
    LOW_PASS,
    FrequencyFilterSpec,
    equalize_histogram,
    fft_filter,
    filter_float,
    transfer_function,
)
from .hog import cell_histograms, hog_features, hog_render, l2_hys
from .shuffle import ShuffleMode, patch_shuffle, pixel_shuffle
from .sift import Keypoint, detect_keypoints, sift_keypoints

TransformFn = Callable[[ImageBuffer, str], Union[ImageBuffer, np.ndarray]]

_MODE_NAMES = {
    "fixed": ShuffleMode.FIXED_ORDER,
    "fixedorder": ShuffleMode.FIXED_ORDER,
    "fixed_order": ShuffleMode.FIXED_ORDER,
    "random": ShuffleMode.RANDOM_ORDER,
    "randomorder": ShuffleMode.RANDOM_ORDER,
    "random_order": ShuffleMode.RANDOM_ORDER,
}


def _parse_mode(value) -> ShuffleMode:
    if isinstance(value, ShuffleMode):
        return value
    key = str(value).lower()
    if key not in _MODE_NAMES:
        raise ValueError(f"unknown shuffle mode {value!r}")
    return _MODE_NAMES[key]


def build_transform(config: dict | None, default_seed: int = 0) -> TransformFn | None:
    """Compile a transform spec dict into a callable.

    ``config["transform"]`` names the operation; remaining keys mirror the
    parameter names of the underlying spec types.  Shuffle transforms read
    ``seed`` from the dict, falling back to ``default_seed``.  None passes
    images through untouched (the reference channel).
    """
    if config is None:
        return None
    if "transform" not in config:
        raise ValueError("transform spec needs a 'transform' field")
    name = config["transform"]
    params = {k: v for k, v in config.items() if k != "transform"}

    if name == "identity":
        return lambda img, sid: img
    if name == "grayscale":
        return lambda img, sid: to_grayscale(img)
    if name == "mean_rgb":
        return lambda img, sid: mean_rgb(img)[0]
    if name in ("pixel_shuffle", "patch_shuffle"):
        mode = _parse_mode(params.get("mode", params.get("variant", "random")))
        seed = int(params.get("seed", default_seed))
        if name == "pixel_shuffle":
            return lambda img, sid: pixel_shuffle(img, mode, seed, sid)
        patch = int(params["patch"])
        return lambda img, sid: patch_shuffle(img, patch, mode, seed, sid)
    if name == "canny":
        spec = CannySpec(
            sigma=float(params.get("sigma", 1.4)),
            low_threshold=float(params.get("low_threshold", params.get("low", 100.0))),
            high_threshold=float(params.get("high_threshold", params.get("high", 200.0))),
        )
        return lambda img, sid: canny(img, spec)
    if name == "fft_filter":
        spec = FrequencyFilterSpec(
            band=params.get("band", LOW_PASS),
            kind=params.get("kind", IDEAL),
            radius=float(params.get("radius", 40.0)),
            order=int(params.get("order", 2)),
            equalize_output=bool(
                params.get("equalize_output", params.get("equalize", False))
            ),
        )
        return lambda img, sid: fft_filter(img, spec)
    if name == "hog":
        cell = int(params.get("cell", 8))
        bins = int(params.get("bins", 9))
        return lambda img, sid: hog_render(img, cell, bins)[0]
    if name == "sift":
        return lambda img, sid: sift_keypoints(img)[1]
    if name == "concat":
        first = build_transform(params["first"], default_seed)
        second = build_transform(params["second"], default_seed)

        def _concat(img: ImageBuffer, sid: str):
            a, b = first(img, sid), second(img, sid)
            if not isinstance(a, ImageBuffer) or not isinstance(b, ImageBuffer):
                raise ValueError("concat expects image-producing transforms")
            return concat_channels(a, b)

        return _concat
    raise ValueError(f"unknown transform {name!r}")


__all__ = [
    "BUTTERWORTH", "HIGH_PASS", "IDEAL", "LOW_PASS",
    "CannySpec", "FrequencyFilterSpec", "Keypoint", "ShuffleMode",
    "TransformFn", "build_transform", "canny", "cell_histograms",
    "concat_channels", "detect_keypoints", "equalize_histogram", "fft_filter",
    "filter_float", "grayscale_f64", "hog_features", "hog_render", "l2_hys",
    "mean_rgb", "patch_shuffle", "pixel_shuffle", "sift_keypoints",
    "to_grayscale", "transfer_function",
]
