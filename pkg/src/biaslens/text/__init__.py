"""Caption-corpus analytics: tokens, phrases, topics, caption classification."""

from .classification import caption_classification
from .lda import EmptyDocument, TopicModel, lda_fit, top_words
from .stopwords import STOPWORDS
from .tokens import (
    Corpus,
    TokenizeConfig,
    build_corpus,
    most_frequent_tokens,
    phrase_frequencies,
    tokenize,
)

__all__ = [
    "Corpus", "EmptyDocument", "STOPWORDS", "TokenizeConfig", "TopicModel",
    "build_corpus", "caption_classification", "lda_fit",
    "most_frequent_tokens", "phrase_frequencies", "tokenize", "top_words",
]
