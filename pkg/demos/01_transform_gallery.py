"""Gallery of every image transform, applied to one synthetic scene.

Writes a PNG per transform into demo_output/transforms/ so the effect of each
information channel can be inspected side by side.

Run: python demos/01_transform_gallery.py
"""

import os

import numpy as np

from biaslens.images import ImageBuffer, save_image
from biaslens.transforms import (
    CannySpec,
    FrequencyFilterSpec,
    ShuffleMode,
    canny,
    fft_filter,
    hog_render,
    mean_rgb,
    patch_shuffle,
    pixel_shuffle,
    sift_keypoints,
    to_grayscale,
)

OUT = os.path.join("demo_output", "transforms")


def synthetic_scene(side=128):
    """A scene with structure at several scales: sky gradient, sun, houses."""
    yy, xx = np.mgrid[0:side, 0:side]
    img = np.zeros((side, side, 3))
    img[:, :, 2] = 150 + 100 * (yy / side)          # sky gradient
    img[:, :, 1] = 80 + 40 * (yy / side)
    img[:, :, 0] = 60
    sun = np.exp(-((yy - 25) ** 2 + (xx - 95) ** 2) / (2 * 9.0**2))
    img[:, :, 0] += 200 * sun
    img[:, :, 1] += 180 * sun
    for left in (10, 55, 95):                        # houses
        img[80:120, left:left + 28] = (120, 70, 50)
        img[72:80, left + 4:left + 24] = (90, 40, 30)
        img[95:110, left + 10:left + 18] = (240, 230, 140)
    rng = np.random.default_rng(0)
    img += rng.normal(0, 4, img.shape)
    return ImageBuffer(np.clip(img, 0, 255).astype(np.uint8))


def main():
    os.makedirs(OUT, exist_ok=True)
    scene = synthetic_scene()
    save_image(scene, f"{OUT}/00_original.png")

    save_image(to_grayscale(scene), f"{OUT}/01_grayscale.png")

    constant, means = mean_rgb(scene)
    save_image(constant, f"{OUT}/02_mean_rgb.png")
    print(f"mean RGB = ({means[0]:.1f}, {means[1]:.1f}, {means[2]:.1f})")

    save_image(
        pixel_shuffle(scene, ShuffleMode.RANDOM_ORDER, seed=7, sample_id="demo"),
        f"{OUT}/03_pixel_shuffle.png",
    )
    save_image(
        patch_shuffle(scene, 16, ShuffleMode.RANDOM_ORDER, seed=7, sample_id="demo"),
        f"{OUT}/04_patch_shuffle_16.png",
    )

    edges = canny(scene, CannySpec(sigma=1.4, low_threshold=60, high_threshold=160))
    save_image(edges, f"{OUT}/05_canny.png")
    print(f"canny marked {int((edges.pixels > 0).sum())} edge pixels")

    for band in ("low", "high"):
        for kind in ("ideal", "butterworth"):
            spec = FrequencyFilterSpec(band=band, kind=kind, radius=20,
                                       equalize_output=(band == "high"))
            save_image(fft_filter(scene, spec), f"{OUT}/06_{kind}_{band}pass.png")

    rendered, features = hog_render(scene, cell=8, bins=9)
    save_image(rendered, f"{OUT}/07_hog.png")
    print(f"hog feature vector has {features.size} dimensions")

    keypoints, overlay = sift_keypoints(scene)
    save_image(overlay, f"{OUT}/08_sift.png")
    print(f"sift found {len(keypoints)} keypoints")
    print(f"gallery written to {OUT}/")


if __name__ == "__main__":
    main()
