"""Command-line entry point: biaslens-annotate."""

from __future__ import annotations

import argparse
import logging
import sys

from .annotate import AnnotationJob, EmptyDirectory, annotate
from .models import ModelLoadError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="biaslens-annotate",
        description="Annotate an image directory with detected objects and "
                    "captions, writing a biaslens-compatible JSONL manifest.",
    )
    parser.add_argument("--images", required=True, help="image directory")
    parser.add_argument("--out", required=True, help="output manifest path")
    parser.add_argument("--vocab", required=True, help="output vocabulary path")
    parser.add_argument("--detector", default="stub",
                        help="stub | torchvision-frcnn")
    parser.add_argument("--captioner", default="stub",
                        help="stub | transformers:<model-id>")
    parser.add_argument("--threshold", type=float, default=0.5,
                        help="detector confidence threshold")
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--device", default=None, help="device hint, e.g. cpu")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    job = AnnotationJob(
        image_dir=args.images,
        out_manifest=args.out,
        out_vocab=args.vocab,
        detector=args.detector,
        captioner=args.captioner,
        confidence_threshold=args.threshold,
        batch_size=args.batch_size,
        device=args.device,
    )
    try:
        written, skipped = annotate(job)
    except (EmptyDirectory, ModelLoadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {written} records to {args.out} ({skipped} skipped)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
