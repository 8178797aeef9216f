"""Pixel- and patch-level spatial permutations.

Both operations move whole pixel tuples (or whole patches), so the multiset of
pixel values is preserved exactly.  FixedOrder applies one permutation to every
image with the same (cropped) geometry; RandomOrder keys the permutation by
sample id as well.
"""

from __future__ import annotations

import enum
import threading

import numpy as np

from ..errors import DegenerateGrid
from ..images import ImageBuffer
from ..rng import Rng, fisher_yates


class ShuffleMode(enum.Enum):
    FIXED_ORDER = "fixed"
    RANDOM_ORDER = "random"


_fixed_cache: dict[tuple, np.ndarray] = {}
_fixed_lock = threading.Lock()


def _grid_permutation(
    n_cells: int, gh: int, gw: int, patch: int,
    mode: ShuffleMode, seed: int, sample_id: str,
) -> np.ndarray:
    if mode is ShuffleMode.FIXED_ORDER:
        key = (seed, gh, gw, patch)
        with _fixed_lock:
            cached = _fixed_cache.get(key)
        if cached is not None:
            return cached
        stream = f"shuffle:fixed:{gh}x{gw}:patch={patch}"
        perm = fisher_yates(n_cells, Rng(seed, stream))
        with _fixed_lock:
            _fixed_cache.setdefault(key, perm)
        return perm
    stream = f"shuffle:random:{gh}x{gw}:patch={patch}:id={sample_id}"
    return fisher_yates(n_cells, Rng(seed, stream))


def patch_shuffle(
    img: ImageBuffer, patch: int, mode: ShuffleMode, seed: int, sample_id: str = "",
) -> ImageBuffer:
    """Center-crop to a whole patch grid, then permute the patches.

    patch=1 degenerates to pixel_shuffle on the cropped image.
    """
    if patch < 1:
        raise ValueError("patch size must be >= 1")
    gh, gw = img.height // patch, img.width // patch
    if gh == 0 or gw == 0:
        raise DegenerateGrid(
            f"patch {patch} leaves a {gh}x{gw} grid on a "
            f"{img.height}x{img.width} image"
        )
    ch, cw = gh * patch, gw * patch
    top, left = (img.height - ch) // 2, (img.width - cw) // 2
    cropped = img.pixels[top:top + ch, left:left + cw, :]

    perm = _grid_permutation(gh * gw, gh, gw, patch, mode, seed, sample_id)
    # cell axis ordering: (grid_y, grid_x, patch_y, patch_x, channel)
    cells = cropped.reshape(gh, patch, gw, patch, img.channels)
    cells = cells.transpose(0, 2, 1, 3, 4).reshape(gh * gw, patch, patch, img.channels)
    shuffled = cells[perm]
    out = (
        shuffled.reshape(gh, gw, patch, patch, img.channels)
        .transpose(0, 2, 1, 3, 4)
        .reshape(ch, cw, img.channels)
    )
    return ImageBuffer(np.ascontiguousarray(out))


def pixel_shuffle(
    img: ImageBuffer, mode: ShuffleMode, seed: int, sample_id: str = "",
) -> ImageBuffer:
    """Permute pixel positions uniformly; (R,G,B) tuples move together."""
    return patch_shuffle(img, 1, mode, seed, sample_id)
