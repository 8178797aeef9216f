"""biaslens-annotator: export object/caption annotations as JSONL manifests."""

from .annotate import AnnotationJob, EmptyDirectory, annotate
from .models import (
    ModelLoadError,
    StubCaptioner,
    StubDetector,
    build_captioner,
    build_detector,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationJob", "EmptyDirectory", "ModelLoadError", "StubCaptioner",
    "StubDetector", "annotate", "build_captioner", "build_detector",
]
