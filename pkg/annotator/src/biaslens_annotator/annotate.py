"""Batch annotation: image directory in, JSONL manifest + vocabulary out.

The emitted manifest follows the biaslens manifest schema (one JSON record
per line: id, image, objects, caption_short, caption_long; UTF-8, LF), so the
analysis toolkit can ingest it directly.  Per-image failures are logged and
skipped; a failing image never aborts the batch.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .models import build_captioner, build_detector

log = logging.getLogger("biaslens_annotator")

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")


class EmptyDirectory(Exception):
    pass


@dataclass(frozen=True)
class AnnotationJob:
    image_dir: str
    out_manifest: str
    out_vocab: str
    detector: str = "stub"
    captioner: str = "stub"
    confidence_threshold: float = 0.5
    batch_size: int = 8
    device: str | None = None


def _image_files(directory: str) -> list[str]:
    try:
        names = sorted(os.listdir(directory))
    except FileNotFoundError as exc:
        raise EmptyDirectory(f"no such directory: {directory}") from exc
    files = [
        os.path.join(directory, n)
        for n in names
        if n.lower().endswith(IMAGE_EXTENSIONS)
    ]
    if not files:
        raise EmptyDirectory(f"no images under {directory}")
    return files


def _load_array(path: str) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def annotate(job: AnnotationJob) -> tuple[int, int]:
    """Run the models over every image; returns (written, skipped) counts."""
    files = _image_files(job.image_dir)
    detector = build_detector(job.detector, device=job.device)
    captioner = build_captioner(job.captioner, device=job.device)

    records = []
    skipped = 0
    for path in files:
        try:
            array = _load_array(path)
            detections = detector.detect(array)
            names = sorted({
                label
                for label, confidence in detections
                if confidence >= job.confidence_threshold
            })
            short, long = captioner.caption(array)
        except Exception as exc:
            skipped += 1
            log.warning("skipping %s: %s", path, exc)
            continue
        records.append({
            "id": os.path.splitext(os.path.basename(path))[0],
            "image": path,
            "objects": names,
            "caption_short": short,
            "caption_long": long,
        })

    os.makedirs(os.path.dirname(os.path.abspath(job.out_manifest)), exist_ok=True)
    with open(job.out_manifest, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    # vocabulary regenerated from the model's label set; line number = index
    with open(job.out_vocab, "w", encoding="utf-8", newline="\n") as fh:
        for label in detector.labels:
            fh.write(label + "\n")
    log.info("wrote %d records to %s (%d skipped)",
             len(records), job.out_manifest, skipped)
    return len(records), skipped
