"""Exception types shared across the toolkit.

Every error raised by the library is a subclass of BiasLensError, so callers
(including the CLI) can separate toolkit failures from genuine bugs.
"""


class BiasLensError(Exception):
    pass


class IoError(BiasLensError):
    """File could not be read or written."""


class ParseError(BiasLensError):
    """Malformed manifest or config content; message names the line(s)."""


class DuplicateId(ParseError):
    """A sample id appears more than once in a manifest."""


class DecodeError(BiasLensError):
    """Unsupported or corrupt raster file."""


class InsufficientSamples(BiasLensError):
    """A manifest is too small for the requested draw."""


class ImageTooSmall(BiasLensError):
    """Transform needs a larger neighborhood than the image provides."""


class DegenerateGrid(BiasLensError):
    """Patch grid would be empty after cropping."""


class DimensionMismatch(BiasLensError):
    pass


class MissingAnnotation(BiasLensError):
    """Sample lacks the objects / label / caption the operation needs."""


class UnknownClass(BiasLensError):
    """Object class name not present in the vocabulary."""


class NonFiniteLoss(BiasLensError):
    """Training diverged; try a lower learning rate."""


class FeatureKindMismatch(BiasLensError):
    pass


class VocabularyMismatch(BiasLensError):
    pass


class InsufficientCaptions(BiasLensError):
    pass


class TransportError(BiasLensError):
    """LLM transport failed after exhausting retries."""


class FormatError(BiasLensError):
    """LLM response could not be split into the expected structure."""


class MissingBlock(BiasLensError):
    """Report lacks the result block a plot export needs."""
