"""Bag-of-words caption classification, feeding the shared trial harness.

This is a deliberately simple proxy for embedding-based caption classifiers;
reports label its numbers as "proxy" so they are not compared with accuracies
obtained from fine-tuned sentence encoders.
"""

from __future__ import annotations

import numpy as np

from ..classify.features import bag_of_words_vector
from ..classify.harness import TrialReport, run_feature_trials
from ..classify.softmax import TrainConfig
from .tokens import Corpus, most_frequent_tokens


def caption_classification(
    corpus: Corpus,
    vocab_size: int,
    cfg: TrainConfig,
    n_trials: int,
    n_train: int,
    n_val: int,
    normalize: bool = False,
) -> TrialReport:
    """L2-normalized token counts over the most frequent tokens, then trials."""
    vocab = most_frequent_tokens(corpus, vocab_size)
    index = {w: i for i, w in enumerate(vocab)}
    x = np.vstack([bag_of_words_vector(doc, index) for doc in corpus.documents])
    labels = corpus.dataset_labels
    k = len(corpus.dataset_names) or int(labels.max()) + 1
    pools = [np.nonzero(labels == d)[0] for d in range(k)]
    names = corpus.dataset_names or tuple(str(i) for i in range(k))
    echo = {
        "mode": "caption_bag_of_words_proxy",
        "vocab_size": int(vocab_size),
        "effective_vocab": len(vocab),
    }
    return run_feature_trials(
        x, labels, pools, cfg, n_trials, n_train, n_val,
        normalize=normalize, class_names=names, config_echo=echo,
    )
