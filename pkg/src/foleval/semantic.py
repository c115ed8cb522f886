"""Embedding-based similarity with greedy token matching.

Two providers: a deterministic built-in fallback (hashed character trigrams,
no model, no network) and a remote HTTP service speaking the batched
``/embed`` protocol.  Scores are the harmonic mean of greedy max-cosine
precision and recall, reported clamped to [0, 1].
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass

import httpx
import numpy as np

FALLBACK_DIM = 256
_SNAP = 1e-12  # cosines this close to 1 are the same unit vector


class ProviderUnavailable(RuntimeError):
    pass


class DimensionMismatch(ValueError):
    pass


class EmptySequence(ValueError):
    pass


@dataclass(frozen=True)
class TokenEmbeddings:
    tokens: list[str]
    vectors: np.ndarray  # shape (len(tokens), dim), rows L2-normalized


@dataclass(frozen=True)
class BertScoreResult:
    precision: float
    recall: float
    f1: float
    score: float  # max(f1, 0), the reported value


def _normalize_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("zero vector cannot be normalized")
    return vectors / norms


def _trigram_vector(token: str) -> np.ndarray:
    padded = f"^{token}$"
    vec = np.zeros(FALLBACK_DIM, dtype=np.float64)
    for i in range(len(padded) - 2):
        tri = padded[i:i + 3]
        slot = int.from_bytes(hashlib.blake2b(tri.encode("utf-8"), digest_size=4).digest(),
                              "big") % FALLBACK_DIM
        vec[slot] += 1.0
    return vec


class FallbackProvider:
    """Deterministic character-trigram embedder; needs no model or network."""

    kind = "fallback"
    dim = FALLBACK_DIM
    endpoint = None

    def __init__(self):
        self._cache: dict[str, np.ndarray] = {}

    def embed_batch(self, sentences: list[list[str]]) -> list[np.ndarray]:
        out = []
        for tokens in sentences:
            rows = []
            for tok in tokens:
                if tok not in self._cache:
                    self._cache[tok] = _trigram_vector(tok)
                rows.append(self._cache[tok])
            out.append(np.stack(rows))
        return out


class RemoteProvider:
    """Client for the HTTP embedding protocol.

    ``POST /embed`` with ``{"sentences": [[token, ...], ...], "model": str}``
    returns ``{"dim": int, "vectors": [[[float, ...], ...], ...]}``; vectors
    need not arrive normalized.  A ``GET /health`` probe must succeed before
    the first batch.  At most ``max_in_flight`` requests run concurrently.
    """

    kind = "remote"

    def __init__(self, endpoint: str, model: str = "default", batch_size: int = 32,
                 max_in_flight: int = 4, timeout: float = 60.0,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.batch_size = batch_size
        self.dim: int | None = None
        self._gate = threading.Semaphore(max_in_flight)
        self._client = httpx.Client(base_url=self.endpoint, timeout=timeout,
                                    transport=transport)
        self._healthy = False
        self._lock = threading.Lock()

    def health(self) -> dict:
        try:
            resp = self._client.get("/health")
            resp.raise_for_status()
        except httpx.HTTPError as err:
            raise ProviderUnavailable(f"health probe failed: {err}") from err
        info = resp.json()
        if info.get("status") != "ok":
            raise ProviderUnavailable(f"provider not ready: {info!r}")
        self.dim = int(info["dim"])
        return info

    def _ensure_healthy(self) -> None:
        with self._lock:
            if not self._healthy:
                self.health()
                self._healthy = True

    def embed_batch(self, sentences: list[list[str]]) -> list[np.ndarray]:
        self._ensure_healthy()
        out: list[np.ndarray] = []
        for start in range(0, len(sentences), self.batch_size):
            chunk = sentences[start:start + self.batch_size]
            with self._gate:
                try:
                    resp = self._client.post(
                        "/embed", json={"sentences": chunk, "model": self.model})
                    resp.raise_for_status()
                except httpx.HTTPError as err:
                    raise ProviderUnavailable(f"embed request failed: {err}") from err
            payload = resp.json()
            dim = int(payload["dim"])
            if self.dim is not None and dim != self.dim:
                raise DimensionMismatch(f"provider dim changed: {dim} != {self.dim}")
            for tokens, vectors in zip(chunk, payload["vectors"]):
                arr = np.asarray(vectors, dtype=np.float64)
                if arr.shape != (len(tokens), dim):
                    raise DimensionMismatch(
                        f"expected {(len(tokens), dim)} vectors, got {arr.shape}")
                out.append(arr)
        return out

    def close(self) -> None:
        self._client.close()


def embed(tokens: list[str], provider) -> TokenEmbeddings:
    """One L2-normalized vector per token."""
    if not tokens:
        raise EmptySequence("cannot embed an empty token sequence")
    raw = provider.embed_batch([list(tokens)])[0]
    return TokenEmbeddings(list(tokens), _normalize_rows(raw))


def embed_many(sentences: list[list[str]], provider) -> list[TokenEmbeddings]:
    for tokens in sentences:
        if not tokens:
            raise EmptySequence("cannot embed an empty token sequence")
    batches = provider.embed_batch([list(s) for s in sentences])
    return [TokenEmbeddings(list(toks), _normalize_rows(arr))
            for toks, arr in zip(sentences, batches)]


def bertscore(reference: TokenEmbeddings, candidate: TokenEmbeddings) -> BertScoreResult:
    """Greedy max-cosine matching: precision over candidate tokens, recall
    over reference tokens, harmonic-mean F1."""
    if reference.vectors.shape[1] != candidate.vectors.shape[1]:
        raise DimensionMismatch(
            f"dims differ: {reference.vectors.shape[1]} != {candidate.vectors.shape[1]}")
    if reference.vectors.shape[0] == 0 or candidate.vectors.shape[0] == 0:
        raise EmptySequence("embeddings must be nonempty")
    sims = candidate.vectors @ reference.vectors.T
    sims = np.clip(sims, -1.0, 1.0)
    sims[sims >= 1.0 - _SNAP] = 1.0
    precision = float(sims.max(axis=1).mean())
    recall = float(sims.max(axis=0).mean())
    if precision + recall <= 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return BertScoreResult(precision, recall, f1, max(f1, 0.0))
