"""biaslens: measure and explain bias among image datasets.

The toolkit isolates information channels with classical image transforms,
trains dataset-origin classifiers on each channel, and runs object-level and
caption-level analyses that produce interpretable bias reports.
"""

from . import classify, llm, objects, text, transforms
from .errors import BiasLensError
from .images import ImageBuffer, load_image, save_image
from .manifest import (
    DatasetManifest,
    Sample,
    load_manifest,
    load_vocabulary,
    save_manifest,
    save_vocabulary,
)
from .rng import Rng, fisher_yates, hash64
from .sampling import Split, sample_split

__version__ = "0.1.0"

__all__ = [
    "BiasLensError", "DatasetManifest", "ImageBuffer", "Rng", "Sample",
    "Split", "classify", "fisher_yates", "hash64", "llm", "load_image",
    "load_manifest", "load_vocabulary", "objects", "sample_split",
    "save_image", "save_manifest", "save_vocabulary", "text", "transforms",
]
