"""Detector and captioner backends.

Two families: deterministic stubs for tests and offline smoke runs, plus thin
adapters over pretrained torchvision / transformers models.  Every backend
exposes the same small surface so the annotation loop stays model-agnostic:

    detector.labels            -> tuple of class names (the vocabulary)
    detector.detect(array)     -> [(label, confidence), ...]
    captioner.caption(array)   -> (short_caption, long_caption)
"""

from __future__ import annotations

import numpy as np


class ModelLoadError(Exception):
    pass


class StubDetector:
    """Content-derived pseudo-detections, fully deterministic.

    Looks at the four quadrants of the image and emits coarse color/luma
    labels per quadrant; repeated labels across quadrants are intentional so
    downstream deduplication gets exercised.  A flat mid-gray image yields no
    detections at all.
    """

    labels = (
        "bright region", "dark region", "red area", "green area",
        "blue area", "textured patch",
    )

    def detect(self, array: np.ndarray) -> list[tuple[str, float]]:
        h, w = array.shape[:2]
        found = []
        for ys, xs in ((slice(0, h // 2), slice(0, w // 2)),
                       (slice(0, h // 2), slice(w // 2, w)),
                       (slice(h // 2, h), slice(0, w // 2)),
                       (slice(h // 2, h), slice(w // 2, w))):
            quad = array[ys, xs].astype(np.float64)
            mean = quad.mean(axis=(0, 1))
            luma = 0.299 * mean[0] + 0.587 * mean[1] + 0.114 * mean[2]
            if luma > 170:
                found.append(("bright region", min(luma / 255.0, 1.0)))
            if luma < 60:
                found.append(("dark region", min(1.0 - luma / 255.0, 1.0)))
            for channel, label in ((0, "red area"), (1, "green area"), (2, "blue area")):
                others = [mean[c] for c in range(3) if c != channel]
                margin = mean[channel] - max(others)
                if margin > 30:
                    found.append((label, min(0.5 + margin / 255.0, 1.0)))
            if quad.std() > 45:
                found.append(("textured patch", min(quad.std() / 128.0, 1.0)))
        return found


class StubCaptioner:
    """Deterministic captions from global image statistics."""

    def caption(self, array: np.ndarray) -> tuple[str, str]:
        mean = array.astype(np.float64).mean(axis=(0, 1))
        luma = 0.299 * mean[0] + 0.587 * mean[1] + 0.114 * mean[2]
        tone = "dark" if luma < 85 else "bright" if luma > 170 else "muted"
        cast = ("red", "green", "blue")[int(np.argmax(mean))]
        short = f"a {tone} image with a {cast} cast"
        long = (
            f"{short}, {array.shape[1]} by {array.shape[0]} pixels, "
            f"average intensity {luma:.0f} of 255"
        )
        return short, long


class TorchvisionDetector:
    """Faster R-CNN over the COCO vocabulary via torchvision weights."""

    def __init__(self, device: str | None = None):
        try:
            import torch
            from torchvision.models import detection
        except ImportError as exc:
            raise ModelLoadError(f"torchvision unavailable: {exc}") from exc
        try:
            weights = detection.FasterRCNN_ResNet50_FPN_Weights.DEFAULT
            self._model = detection.fasterrcnn_resnet50_fpn(weights=weights)
        except Exception as exc:
            raise ModelLoadError(f"could not load detector weights: {exc}") from exc
        self._model.eval()
        self._torch = torch
        self._device = device or "cpu"
        self._model.to(self._device)
        self.labels = tuple(weights.meta["categories"])

    def detect(self, array: np.ndarray) -> list[tuple[str, float]]:
        tensor = self._torch.from_numpy(array).permute(2, 0, 1).float() / 255.0
        with self._torch.no_grad():
            (output,) = self._model([tensor.to(self._device)])
        return [
            (self.labels[int(i)], float(s))
            for i, s in zip(output["labels"], output["scores"])
        ]


class TransformersCaptioner:
    """Image-to-text pipeline adapter; greedy decoding for reproducibility."""

    def __init__(self, model_id: str, device: str | None = None):
        try:
            from transformers import pipeline
        except ImportError as exc:
            raise ModelLoadError(f"transformers unavailable: {exc}") from exc
        try:
            self._pipe = pipeline("image-to-text", model=model_id,
                                  device=-1 if device in (None, "cpu") else device)
        except Exception as exc:
            raise ModelLoadError(f"could not load captioner {model_id!r}: {exc}") from exc

    def caption(self, array: np.ndarray) -> tuple[str, str]:
        from PIL import Image

        image = Image.fromarray(array)
        short = self._pipe(image, generate_kwargs={"do_sample": False,
                                                   "max_new_tokens": 30})
        long = self._pipe(image, generate_kwargs={"do_sample": False,
                                                  "max_new_tokens": 120})
        return (
            short[0]["generated_text"].strip(),
            long[0]["generated_text"].strip(),
        )


def build_detector(name: str, device: str | None = None):
    if name == "stub":
        return StubDetector()
    if name == "torchvision-frcnn":
        return TorchvisionDetector(device=device)
    raise ModelLoadError(f"unknown detector {name!r}")


def build_captioner(name: str, device: str | None = None):
    if name == "stub":
        return StubCaptioner()
    if name.startswith("transformers:"):
        return TransformersCaptioner(name.split(":", 1)[1], device=device)
    raise ModelLoadError(f"unknown captioner {name!r}")
