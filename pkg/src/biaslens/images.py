"""8-bit raster buffers and PNG/JPEG codecs.

ImageBuffer is the unit every transform consumes and produces: a row-major
H x W x C uint8 array with 1 (grayscale) or 3 (RGB) interleaved channels.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, IoError


@dataclass(frozen=True)
class ImageBuffer:
    """Immutable H x W x C uint8 raster, C in {1, 3}."""

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, np.newaxis]
        if px.ndim != 3:
            raise ValueError(f"expected HxWxC array, got shape {px.shape}")
        if px.dtype != np.uint8:
            raise ValueError(f"expected uint8 samples, got {px.dtype}")
        if px.shape[2] not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {px.shape[2]}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"degenerate image shape {px.shape}")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def data(self) -> bytes:
        """Row-major interleaved samples; len = width*height*channels."""
        return self.pixels.tobytes()

    def as_float(self) -> np.ndarray:
        """Float64 copy of the samples (still 0..255)."""
        return self.pixels.astype(np.float64)


def load_image(path) -> ImageBuffer:
    """Decode a PNG or baseline JPEG file.

    Color sources decode to 3 channels, grayscale sources to 1; an alpha
    channel is dropped.
    """
    if not os.path.exists(path):
        raise IoError(f"no such image file: {path}")
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "JPEG"):
                raise DecodeError(f"{path}: unsupported format {im.format!r}")
            if im.mode in ("1", "L", "LA", "I", "I;16"):
                im = im.convert("L")
                arr = np.asarray(im, dtype=np.uint8)[:, :, np.newaxis]
            else:
                im = im.convert("RGB")
                arr = np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise DecodeError(f"{path}: not a decodable image") from exc
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    return ImageBuffer(arr)


def save_image(img: ImageBuffer, path) -> None:
    """Write an ImageBuffer as PNG (lossless round-trip)."""
    arr = img.pixels
    if arr.shape[2] == 1:
        pil = Image.fromarray(arr[:, :, 0], mode="L")
    else:
        pil = Image.fromarray(arr, mode="RGB")
    try:
        pil.save(path, format="PNG")
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc


def from_float(arr: np.ndarray) -> ImageBuffer:
    """Clamp a float array to [0, 255], round half up, and wrap as uint8."""
    clipped = np.clip(arr, 0.0, 255.0)
    return ImageBuffer(np.floor(clipped + 0.5).astype(np.uint8))
