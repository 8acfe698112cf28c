"""Embedding providers, the in-memory vector index, and cosine top-k.

Two providers share one interface: an HTTP provider speaking the wire
contract ``POST {"texts": [...]} -> {"dimension": d, "vectors": [[...]]}``
and a deterministic hash-bucket embedder for offline runs and tests. The
index is brute-force; at ≤30k training texts nothing fancier is warranted.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np
import requests

DEFAULT_DIMENSION = 384


class EmbeddingError(Exception):
    pass


class EmbeddingProvider(Protocol):
    dimension: int

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]: ...


class HashEmbedder:
    """Deterministic bag-of-tokens embedder over hashed buckets.

    Same text always maps to the same vector, and texts sharing tokens get
    correlated vectors, which is all the retrieval tests need. Token hashing
    uses blake2b, so vectors are stable across processes and platforms.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise EmbeddingError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension

    def _bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dimension

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        out = []
        for text in texts:
            vec = np.zeros(self.dimension, dtype=np.float64)
            tokens = text.lower().split() or ["\x00empty"]
            for token in tokens:
                vec[self._bucket(token)] += 1.0
            out.append(vec)
        return out


class HTTPEmbedder:
    """Client for an embedding service speaking the documented wire contract.

    The auth token is read from the environment at call time and never
    stored. ``dimension`` may be declared up front or learned from the first
    response; either way every response must agree with it.
    """

    def __init__(
        self,
        base_url: str,
        dimension: int | None = None,
        auth_env: str = "EMBEDDING_API_KEY",
        timeout: float = 30.0,
        post=requests.post,
    ):
        self.base_url = base_url
        self.dimension = dimension or 0
        self.auth_env = auth_env
        self.timeout = timeout
        self._post = post

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        headers = {}
        token = os.environ.get(self.auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        try:
            response = self._post(
                self.base_url,
                json={"texts": list(texts)},
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise EmbeddingError(f"embedding provider unreachable: {exc}") from exc
        if getattr(response, "status_code", 200) != 200:
            raise EmbeddingError(
                f"embedding provider returned status {response.status_code}"
            )
        payload = response.json()
        declared = int(payload["dimension"])
        if self.dimension and declared != self.dimension:
            raise EmbeddingError(
                f"provider declared dimension {declared}, expected {self.dimension}"
            )
        self.dimension = declared
        vectors = [np.asarray(v, dtype=np.float64) for v in payload["vectors"]]
        return vectors


def embed(texts: Sequence[str], provider: EmbeddingProvider) -> list[np.ndarray]:
    """Embed a batch; one finite vector of the provider dimension per text."""
    if not texts:
        return []
    vectors = provider.embed_batch(texts)
    if len(vectors) != len(texts):
        raise EmbeddingError(
            f"provider returned {len(vectors)} vectors for {len(texts)} texts"
        )
    for vec in vectors:
        if vec.shape != (provider.dimension,):
            raise EmbeddingError(
                f"vector of shape {vec.shape} does not match provider "
                f"dimension {provider.dimension}"
            )
        if not np.isfinite(vec).all():
            raise EmbeddingError("provider returned a non-finite vector component")
    return vectors


@dataclass(frozen=True)
class EmbeddingIndex:
    """Immutable (doc_id, vector) index with a shared dimension."""

    doc_ids: tuple[str, ...]
    vectors: np.ndarray  # (n, dimension), float64

    def __post_init__(self) -> None:
        if self.vectors.ndim != 2:
            raise EmbeddingError("index vectors must form a 2-d matrix")
        if len(self.doc_ids) != self.vectors.shape[0]:
            raise EmbeddingError("doc_ids and vectors disagree in length")
        if not np.isfinite(self.vectors).all():
            raise EmbeddingError("index contains non-finite components")
        norms = np.linalg.norm(self.vectors, axis=1)
        if len(self.doc_ids) and (norms == 0).any():
            bad = self.doc_ids[int(np.argmin(norms))]
            raise EmbeddingError(f"zero-norm vector for entry {bad!r}")

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    @property
    def entries(self) -> list[tuple[str, np.ndarray]]:
        return [(doc_id, self.vectors[i]) for i, doc_id in enumerate(self.doc_ids)]


def build_index(
    items: Iterable[tuple[str, str]],
    provider: EmbeddingProvider,
    batch_size: int = 64,
) -> EmbeddingIndex:
    """Embed (doc_id, text) pairs in batches into an index."""
    ids: list[str] = []
    texts: list[str] = []
    for doc_id, text in items:
        ids.append(doc_id)
        texts.append(text)
    vectors: list[np.ndarray] = []
    for i in range(0, len(texts), batch_size):
        vectors.extend(embed(texts[i : i + batch_size], provider))
    matrix = (
        np.stack(vectors)
        if vectors
        else np.zeros((0, provider.dimension), dtype=np.float64)
    )
    return EmbeddingIndex(doc_ids=tuple(ids), vectors=matrix)


def top_k_cosine(query: np.ndarray, index: EmbeddingIndex, k: int) -> list[str]:
    """Doc ids of the k most cosine-similar entries, best first.

    Ties break by ascending entry position; k beyond the index size returns
    everything. Zero-norm queries are rejected: their cosine is undefined and
    silently ranking on noise would be worse than failing.
    """
    if k < 1:
        raise EmbeddingError(f"k must be positive, got {k}")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (index.dimension,):
        raise EmbeddingError(
            f"query dimension {query.shape} does not match index ({index.dimension},)"
        )
    if not np.isfinite(query).all():
        raise EmbeddingError("query vector has non-finite components")
    qnorm = np.linalg.norm(query)
    if qnorm == 0:
        raise EmbeddingError("query vector has zero norm; cosine undefined")
    if len(index) == 0:
        return []
    norms = np.linalg.norm(index.vectors, axis=1)
    sims = (index.vectors @ query) / (norms * qnorm)
    order = np.argsort(-sims, kind="stable")
    return [index.doc_ids[i] for i in order[: min(k, len(index))]]
