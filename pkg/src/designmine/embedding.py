"""Term embedding providers.

The default is a dependency-free character-trigram feature hasher into a
384-dimensional L2-normalized space. Real sentence-embedding models can be
plugged in through the same interface without touching the clustering code.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Protocol, runtime_checkable

import numpy as np

from .errors import ProviderError

DEFAULT_DIM = 384


@runtime_checkable
class EmbeddingProvider(Protocol):
    name: str
    dim: int

    def embed(self, term: str) -> np.ndarray: ...


class HashEmbedder:
    """Signed feature hashing of character n-grams (default n=3).

    Deterministic across processes: bucket and sign come from blake2b of
    the n-gram bytes, never from Python's salted hash().
    """

    def __init__(self, dim: int = DEFAULT_DIM, ngram: int = 3):
        if dim < 1 or ngram < 1:
            raise ValueError("dim and ngram must be positive")
        self.name = f"char{ngram}-hash{dim}"
        self.dim = dim
        self.ngram = ngram

    def embed(self, term: str) -> np.ndarray:
        padded = "#" + term.lower() + "#"
        vec = np.zeros(self.dim, dtype=np.float64)
        n = self.ngram
        if len(padded) < n:
            grams = [padded]
        else:
            grams = [padded[i : i + n] for i in range(len(padded) - n + 1)]
        for gram in grams:
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
            h = int.from_bytes(digest, "big")
            sign = 1.0 if h & 1 else -1.0
            vec[(h >> 1) % self.dim] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


def embed_terms(terms: Iterable[str], provider: EmbeddingProvider) -> np.ndarray:
    """Embed deduplicated terms row-by-row into a |terms| x dim matrix."""
    terms = list(terms)
    out = np.zeros((len(terms), provider.dim), dtype=np.float64)
    for i, term in enumerate(terms):
        row = np.asarray(provider.embed(term), dtype=np.float64)
        if row.shape != (provider.dim,):
            raise ProviderError(
                f"provider {provider.name!r} returned shape {row.shape} for {term!r},"
                f" expected ({provider.dim},)"
            )
        out[i] = row
    return out


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))
