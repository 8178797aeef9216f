"""Dataset-origin classification harness."""

from .features import (
    BAG_OF_OBJECTS,
    BAG_OF_WORDS,
    HOG,
    MEAN_RGB,
    RAW_PIXELS,
    FeatureSpec,
    bag_of_objects_vector,
    bag_of_words_vector,
    extract_features,
    featurize_manifests,
    resize_bilinear,
)
from .harness import (
    FILTER_RADIUS_AXIS,
    PATCH_SIZE_AXIS,
    TrialReport,
    pseudo_dataset_check,
    run_feature_trials,
    run_trials,
    standardize,
    sweep,
)
from .softmax import (
    SoftmaxModel,
    TrainConfig,
    evaluate,
    linear_saliency,
    loss_and_grad,
    predict,
    predict_logits,
    smoothed_targets,
    softmax,
    train,
)

__all__ = [
    "BAG_OF_OBJECTS", "BAG_OF_WORDS", "FILTER_RADIUS_AXIS", "HOG", "MEAN_RGB",
    "PATCH_SIZE_AXIS", "RAW_PIXELS", "FeatureSpec", "SoftmaxModel",
    "TrainConfig", "TrialReport", "bag_of_objects_vector",
    "bag_of_words_vector", "evaluate", "extract_features",
    "featurize_manifests", "linear_saliency", "loss_and_grad", "predict",
    "predict_logits", "pseudo_dataset_check", "resize_bilinear",
    "run_feature_trials", "run_trials", "smoothed_targets", "softmax",
    "standardize", "sweep", "train",
]
