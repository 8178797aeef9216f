"""Shared synthetic corpora for the test suite.

Image corpora are generated once per session with fixed numpy seeds, written
as real PNG files, and loaded back through the public manifest API, so every
test exercises the same I/O path the toolkit uses in production.
"""

import json
import os

import numpy as np
import pytest

from biaslens.images import ImageBuffer, save_image
from biaslens.manifest import load_manifest


def write_image_manifest(root, name, images):
    """Write images as PNGs plus a JSONL manifest; returns the manifest path."""
    img_dir = os.path.join(root, name)
    os.makedirs(img_dir, exist_ok=True)
    lines = []
    for i, arr in enumerate(images):
        path = os.path.join(img_dir, f"{i}.png")
        save_image(ImageBuffer(arr), path)
        lines.append(json.dumps({"id": f"{name}-{i}", "image": path}))
    manifest_path = os.path.join(root, f"{name}.jsonl")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest_path


@pytest.fixture(scope="session")
def color_manifests(tmp_path_factory):
    """Three datasets separated only by channel mean (60/128/196, sigma 20)."""
    root = str(tmp_path_factory.mktemp("color"))
    gen = np.random.default_rng(1001)
    manifests = []
    for mu, name in [(60, "dark"), (128, "mid"), (196, "bright")]:
        images = [
            np.clip(gen.normal(mu, 20, (16, 16, 3)), 0, 255).astype(np.uint8)
            for _ in range(300)
        ]
        manifests.append(load_manifest(write_image_manifest(root, name, images)))
    return manifests


@pytest.fixture(scope="session")
def layout_manifests(tmp_path_factory):
    """Horizontal- vs vertical-ramp datasets with identical pixel multisets.

    Every vertical image is the exact transpose of its horizontal twin, so
    the two datasets differ only in pixel layout.
    """
    root = str(tmp_path_factory.mktemp("layout"))
    gen = np.random.default_rng(2002)
    horizontal, vertical = [], []
    for _ in range(300):
        profile = np.sort(gen.uniform(0, 255, 32))
        noise = gen.normal(0, 8, (32, 32, 3))
        h = np.clip(profile[None, :, None] + noise, 0, 255).astype(np.uint8)
        horizontal.append(h)
        vertical.append(np.transpose(h, (1, 0, 2)).copy())
    return [
        load_manifest(write_image_manifest(root, "rows", horizontal)),
        load_manifest(write_image_manifest(root, "cols", vertical)),
    ]


@pytest.fixture(scope="session")
def homogeneous_manifest(tmp_path_factory):
    """One large corpus with no structure for the memorization control."""
    root = str(tmp_path_factory.mktemp("homogeneous"))
    gen = np.random.default_rng(3003)
    images = [
        np.clip(gen.normal(128, 40, (16, 16, 3)), 0, 255).astype(np.uint8)
        for _ in range(3000)
    ]
    return load_manifest(write_image_manifest(root, "pool", images))


@pytest.fixture(scope="session")
def chance_manifests(tmp_path_factory):
    """Two datasets drawn from the same distribution (no real signal)."""
    root = str(tmp_path_factory.mktemp("chance"))
    gen = np.random.default_rng(4004)
    manifests = []
    for name in ("first", "second"):
        images = [
            np.clip(gen.normal(128, 30, (16, 16, 3)), 0, 255).astype(np.uint8)
            for _ in range(300)
        ]
        manifests.append(load_manifest(write_image_manifest(root, name, images)))
    return manifests
