"""Channel concatenation of two transformed images (classifier input only)."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch
from ..images import ImageBuffer


def concat_channels(a: ImageBuffer, b: ImageBuffer) -> np.ndarray:
    """Stack a's channels before b's.

    The result usually has 2, 4 or 6 channels, so it is returned as a plain
    H x W x C uint8 array rather than an ImageBuffer and cannot be written
    as a PNG; it exists to feed the classifier.
    """
    if (a.height, a.width) != (b.height, b.width):
        raise DimensionMismatch(
            f"cannot concatenate {a.height}x{a.width} with {b.height}x{b.width}"
        )
    return np.concatenate([a.pixels, b.pixels], axis=2)
