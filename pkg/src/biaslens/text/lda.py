"""Latent Dirichlet allocation via collapsed Gibbs sampling.

The per-token resampling loop is compiled with numba; all randomness is drawn
up front from the shared PCG64 generator, one uniform per token per sweep, so
fits are bit-reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..errors import BiasLensError
from ..rng import Rng
from .tokens import Corpus


class EmptyDocument(BiasLensError):
    pass


@dataclass(frozen=True)
class TopicModel:
    k: int
    phi: np.ndarray = field(repr=False)  # (K, V) topic-word distributions
    theta: np.ndarray = field(repr=False)  # (D, K) document-topic distributions
    alpha: float
    beta: float
    assignments: tuple = field(repr=False)  # per-document arrays of topic ids
    vocab: tuple[str, ...] = ()
    # final bookkeeping counts, kept so consistency can be re-checked
    topic_word_counts: np.ndarray = field(repr=False, default=None)
    doc_topic_counts: np.ndarray = field(repr=False, default=None)
    topic_counts: np.ndarray = field(repr=False, default=None)


@njit(cache=True)
def _gibbs_sweep(z, doc_ids, word_ids, n_dk, n_kw, n_k, alpha, beta, uniforms, probs):
    n_tokens = z.shape[0]
    k_topics = n_dk.shape[1]
    vbeta = n_kw.shape[1] * beta
    for t in range(n_tokens):
        d = doc_ids[t]
        w = word_ids[t]
        old = z[t]
        n_dk[d, old] -= 1
        n_kw[old, w] -= 1
        n_k[old] -= 1
        total = 0.0
        for k in range(k_topics):
            p = (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + vbeta)
            probs[k] = p
            total += p
        u = uniforms[t] * total
        acc = 0.0
        new = k_topics - 1
        for k in range(k_topics):
            acc += probs[k]
            if u < acc:
                new = k
                break
        z[t] = new
        n_dk[d, new] += 1
        n_kw[new, w] += 1
        n_k[new] += 1


def lda_fit(
    corpus: Corpus,
    k: int = 5,
    alpha: float = 0.1,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
) -> TopicModel:
    """Collapsed Gibbs sampling with the token's own count excluded.

    Topic assignments start uniform at random; after the final sweep phi and
    theta are the posterior-mean estimates from the remaining counts.
    """
    if k < 2:
        raise ValueError("need at least 2 topics")
    if not corpus.documents:
        raise ValueError("corpus is empty")
    for i, doc in enumerate(corpus.documents):
        if not doc:
            raise EmptyDocument(f"document {i} has no tokens")
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be > 0")

    vocab = corpus.vocab or tuple(sorted({w for d in corpus.documents for w in d}))
    vindex = {w: i for i, w in enumerate(vocab)}
    doc_ids, word_ids = [], []
    for d, doc in enumerate(corpus.documents):
        for w in doc:
            doc_ids.append(d)
            word_ids.append(vindex[w])
    doc_ids = np.array(doc_ids, dtype=np.int64)
    word_ids = np.array(word_ids, dtype=np.int64)
    n_tokens = doc_ids.shape[0]
    n_docs = len(corpus.documents)
    v = len(vocab)

    rng = Rng(seed, stream="lda")
    z = np.minimum((rng.random(n_tokens) * k).astype(np.int64), k - 1)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, v), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    np.add.at(n_dk, (doc_ids, z), 1)
    np.add.at(n_kw, (z, word_ids), 1)
    np.add.at(n_k, z, 1)

    probs = np.zeros(k)
    for _ in range(iterations):
        uniforms = rng.random(n_tokens)
        _gibbs_sweep(z, doc_ids, word_ids, n_dk, n_kw, n_k,
                     float(alpha), float(beta), uniforms, probs)

    phi = (n_kw + beta) / (n_k[:, np.newaxis] + v * beta)
    doc_lengths = n_dk.sum(axis=1, keepdims=True)
    theta = (n_dk + alpha) / (doc_lengths + k * alpha)
    assignments = []
    for d in range(n_docs):
        assignments.append(z[doc_ids == d].copy())
    return TopicModel(
        k=k, phi=phi, theta=theta, alpha=alpha, beta=beta,
        assignments=tuple(assignments), vocab=vocab,
        topic_word_counts=n_kw, doc_topic_counts=n_dk, topic_counts=n_k,
    )


def top_words(model: TopicModel, per_topic: int = 5) -> list[list[str]]:
    """Highest-phi words per topic, ties broken alphabetically."""
    if per_topic < 1:
        raise ValueError("per_topic must be >= 1")
    out = []
    for t in range(model.k):
        order = sorted(
            range(len(model.vocab)),
            key=lambda w: (-model.phi[t, w], model.vocab[w]),
        )
        out.append([model.vocab[w] for w in order[:per_topic]])
    return out
