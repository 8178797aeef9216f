"""Caption tokenization, corpus assembly, and phrase counting."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import MissingAnnotation
from .stopwords import STOPWORDS

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class TokenizeConfig:
    min_length: int = 2
    emit_bigrams: bool = False
    stopwords: frozenset = STOPWORDS


def tokenize(text: str, config: TokenizeConfig = TokenizeConfig()) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stopwords and short tokens.

    With emit_bigrams, adjacent surviving tokens are additionally joined with
    an underscore and appended after the unigrams.
    """
    words = [
        w
        for w in _TOKEN_RE.findall(text.lower())
        if len(w) >= config.min_length and w not in config.stopwords
    ]
    if config.emit_bigrams and len(words) >= 2:
        words = words + [f"{a}_{b}" for a, b in zip(words, words[1:])]
    return words


@dataclass(frozen=True)
class Corpus:
    """Tokenized documents with aligned dataset labels and a corpus vocab."""

    documents: tuple[tuple[str, ...], ...]
    dataset_labels: np.ndarray = field(repr=False)
    dataset_names: tuple[str, ...] = ()
    vocab: tuple[str, ...] = ()

    @property
    def vocab_index(self) -> dict:
        return {w: i for i, w in enumerate(self.vocab)}

    def documents_for(self, dataset: int) -> list[tuple[str, ...]]:
        return [
            doc
            for doc, lab in zip(self.documents, self.dataset_labels)
            if lab == dataset
        ]


def build_corpus(
    manifests,
    caption_field: str = "short",
    config: TokenizeConfig = TokenizeConfig(),
    keep_empty: bool = False,
) -> Corpus:
    """Tokenize one caption per sample across manifests.

    Samples without the requested caption raise MissingAnnotation; documents
    that tokenize to nothing are dropped unless keep_empty is set.
    """
    documents, labels = [], []
    for mi, manifest in enumerate(manifests):
        for sample in manifest.samples:
            text = sample.caption(caption_field)
            if text is None:
                raise MissingAnnotation(
                    f"{manifest.name}/{sample.id}: no {caption_field} caption"
                )
            tokens = tuple(tokenize(text, config))
            if not tokens and not keep_empty:
                continue
            documents.append(tokens)
            labels.append(mi)
    vocab = tuple(sorted({w for doc in documents for w in doc}))
    return Corpus(
        documents=tuple(documents),
        dataset_labels=np.array(labels, dtype=np.int64),
        dataset_names=tuple(m.name for m in manifests),
        vocab=vocab,
    )


def phrase_frequencies(corpus: Corpus, n_top: int = 100) -> list[list[tuple[str, int]]]:
    """Top unigram+bigram counts per dataset, ties broken alphabetically."""
    if n_top < 1:
        raise ValueError("n_top must be >= 1")
    results = []
    for d in range(len(corpus.dataset_names) or int(corpus.dataset_labels.max()) + 1):
        counts: Counter = Counter()
        for doc in corpus.documents_for(d):
            counts.update(doc)
            counts.update(f"{a}_{b}" for a, b in zip(doc, doc[1:]))
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        results.append(ranked[:n_top])
    return results


def most_frequent_tokens(corpus: Corpus, vocab_size: int) -> tuple[str, ...]:
    """The vocab_size most frequent tokens (count desc, then alphabetical)."""
    counts: Counter = Counter()
    for doc in corpus.documents:
        counts.update(doc)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(w for w, _ in ranked[:vocab_size])
