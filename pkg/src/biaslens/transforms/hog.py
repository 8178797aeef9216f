"""Histogram-of-oriented-gradients features and their line rendering."""

from __future__ import annotations

import numpy as np

from ..errors import ImageTooSmall
from ..images import ImageBuffer
from .color import grayscale_f64

_EPS = 1e-8
L2_HYS_CLIP = 0.2


def gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central differences (one-sided at borders), x then y."""
    gy, gx = np.gradient(gray)
    return gx, gy


def cell_histograms(gray: np.ndarray, cell: int, bins: int) -> np.ndarray:
    """Per-cell unsigned orientation histograms, magnitude weighted.

    Orientations live on [0, 180) with bin centers at i * (180 / bins); each
    vote splits linearly between the two nearest centers (wrapping at 180).
    The grid truncates any remainder rows/columns at the bottom and right.
    Returns an array of shape (cells_y, cells_x, bins).
    """
    gx, gy = gradients(gray)
    mag = np.hypot(gx, gy)
    ang = np.degrees(np.arctan2(gy, gx)) % 180.0

    width = 180.0 / bins
    pos = ang / width
    lo = np.floor(pos).astype(int)
    frac = pos - lo
    hi = (lo + 1) % bins
    lo %= bins

    cy, cx = gray.shape[0] // cell, gray.shape[1] // cell
    hist = np.zeros((cy, cx, bins))
    for by in range(cy):
        for bx in range(cx):
            sl = (slice(by * cell, (by + 1) * cell), slice(bx * cell, (bx + 1) * cell))
            m, l, h, f = mag[sl].ravel(), lo[sl].ravel(), hi[sl].ravel(), frac[sl].ravel()
            hist[by, bx] += np.bincount(l, weights=m * (1 - f), minlength=bins)
            hist[by, bx] += np.bincount(h, weights=m * f, minlength=bins)
    return hist


def l2_hys(vec: np.ndarray, clip: float = L2_HYS_CLIP) -> np.ndarray:
    """L2 normalize, clip components at `clip`, renormalize."""
    v = vec / np.sqrt(np.sum(vec**2) + _EPS**2)
    v = np.minimum(v, clip)
    return v / np.sqrt(np.sum(v**2) + _EPS**2)


def hog_features(gray: np.ndarray, cell: int, bins: int) -> np.ndarray:
    """Concatenated L2-Hys-normalized 2x2-cell blocks (stride one cell)."""
    hist = cell_histograms(gray, cell, bins)
    cy, cx = hist.shape[:2]
    blocks = []
    for by in range(cy - 1):
        for bx in range(cx - 1):
            block = hist[by:by + 2, bx:bx + 2].ravel()
            blocks.append(l2_hys(block))
    if not blocks:
        return np.zeros(0)
    return np.concatenate(blocks)


def _draw_line(canvas: np.ndarray, y0: float, x0: float, angle_deg: float,
               half_len: float, value: float) -> None:
    theta = np.radians(angle_deg)
    dy, dx = np.sin(theta), np.cos(theta)
    for t in np.arange(-half_len, half_len + 0.25, 0.5):
        y, x = int(round(y0 + t * dy)), int(round(x0 + t * dx))
        if 0 <= y < canvas.shape[0] and 0 <= x < canvas.shape[1]:
            canvas[y, x] = max(canvas[y, x], value)


def hog_render(img: ImageBuffer, cell: int = 8, bins: int = 9):
    """Feature vector plus a per-cell dominant-orientation line drawing.

    Each cell draws a line along its dominant edge direction (gradient
    direction + 90 degrees) with brightness proportional to the cell's total
    gradient energy, normalized over the image.  A constant image therefore
    renders black with an all-zero feature vector.

    Returns (rendered 1-channel ImageBuffer, feature vector).
    """
    if img.height < cell or img.width < cell:
        raise ImageTooSmall(
            f"hog needs at least one {cell}x{cell} cell, got {img.height}x{img.width}"
        )
    gray = grayscale_f64(img)
    hist = cell_histograms(gray, cell, bins)
    features = hog_features(gray, cell, bins)

    energy = hist.sum(axis=2)
    peak = energy.max()
    canvas = np.zeros(gray.shape)
    if peak > 0:
        width = 180.0 / bins
        cy, cx = hist.shape[:2]
        for by in range(cy):
            for bx in range(cx):
                if energy[by, bx] <= 0:
                    continue
                dominant = int(np.argmax(hist[by, bx]))
                edge_angle = dominant * width + 90.0
                _draw_line(
                    canvas,
                    by * cell + (cell - 1) / 2.0,
                    bx * cell + (cell - 1) / 2.0,
                    edge_angle,
                    cell / 2.0 - 0.5,
                    energy[by, bx] / peak * 255.0,
                )
    rendered = ImageBuffer(np.floor(canvas + 0.5).astype(np.uint8)[:, :, np.newaxis])
    return rendered, features
