"""Text similarity used by the fuzzy primitives.

The default backend embeds a string as its bag of character trigrams, which
keeps every evaluation reproducible offline. An HTTP embedding service can be
plugged in instead::

    POST <endpoint>/embed   {"texts": [...]}  ->  {"vectors": [[...], ...]}
"""

from __future__ import annotations

import json
import math
import re
import threading
import urllib.error
import urllib.request
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol

from .errors import ConfigError, ExternalServiceUnavailable

DEFAULT_THETA = 0.85

_WS = re.compile(r"\s+")

EmbeddingVector = Mapping[str, int] | Sequence[float]


@dataclass(frozen=True)
class SimilarityConfig:
    backend: str = "lexical"
    theta_screen: float = DEFAULT_THETA
    theta_textbox: float = DEFAULT_THETA
    external_endpoint: str | None = None

    def __post_init__(self):
        if self.backend not in ("lexical", "external"):
            raise ConfigError(f"unknown similarity backend {self.backend!r}")
        for name in ("theta_screen", "theta_textbox"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name}={value} outside [0,1]")
        if self.backend == "external" and not self.external_endpoint:
            raise ConfigError("external backend needs an endpoint")


def normalize(text: str) -> str:
    return _WS.sub(" ", text.lower())


def trigrams(text: str) -> Counter:
    norm = normalize(text)
    if not norm:
        return Counter()
    if len(norm) < 3:
        return Counter({norm: 1})
    return Counter(norm[i:i + 3] for i in range(len(norm) - 2))


def embed(text: str) -> Counter:
    """Lexical embedding: trigram counts of the normalized text."""
    return trigrams(text)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if not a or not b:
        return 0.0
    if isinstance(a, Mapping) != isinstance(b, Mapping):
        raise TypeError("cannot compare sparse and dense embeddings")
    if isinstance(a, Mapping):
        if len(b) < len(a):
            a, b = b, a
        dot = sum(v * b.get(k, 0) for k, v in a.items())
        na = math.sqrt(sum(v * v for v in a.values()))
        nb = math.sqrt(sum(v * v for v in b.values()))
    else:
        if len(a) != len(b):
            raise ValueError("dense embeddings differ in dimension")
        dot = sum(x * y for x, y in zip(a, b))
        na = math.sqrt(sum(x * x for x in a))
        nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    # dense vectors may point away from each other; clamp into [0, 1]
    return min(1.0, max(0.0, dot / (na * nb)))


class Embedder(Protocol):
    def embed(self, text: str) -> EmbeddingVector: ...


class LexicalEmbedder:
    def embed(self, text: str) -> Counter:
        return trigrams(text)


class ExternalEmbedder:
    """Client for an HTTP embedding service. Results are memoized per text."""

    def __init__(self, endpoint: str, timeout: float = 5.0):
        self.url = endpoint.rstrip("/") + "/embed"
        self.timeout = timeout
        self._cache: dict[str, list[float]] = {}
        self._lock = threading.Lock()

    def embed_many(self, texts: Sequence[str]) -> list[list[float]]:
        with self._lock:
            missing = [t for t in dict.fromkeys(texts) if t not in self._cache]
        if missing:
            body = json.dumps({"texts": missing}).encode()
            req = urllib.request.Request(self.url, data=body, headers={"Content-Type": "application/json"})
            try:
                with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                    vectors = json.loads(resp.read())["vectors"]
            except (urllib.error.URLError, OSError, ValueError, KeyError) as exc:
                raise ExternalServiceUnavailable(f"{self.url}: {exc}") from exc
            if len(vectors) != len(missing):
                raise ExternalServiceUnavailable(f"{self.url}: expected {len(missing)} vectors, got {len(vectors)}")
            with self._lock:
                self._cache.update(zip(missing, ([float(x) for x in v] for v in vectors)))
        with self._lock:
            return [self._cache[t] for t in texts]

    def embed(self, text: str) -> list[float]:
        if not text:
            return []
        return self.embed_many([text])[0]


def make_embedder(cfg: SimilarityConfig) -> Embedder:
    if cfg.backend == "external":
        return ExternalEmbedder(cfg.external_endpoint)
    return LexicalEmbedder()


def similarity(a: str, b: str, embedder: Embedder | None = None) -> float:
    embedder = embedder or LexicalEmbedder()
    return cosine(embedder.embed(a), embedder.embed(b))


def text_similar(a: str, b: str, theta: float = DEFAULT_THETA, embedder: Embedder | None = None) -> bool:
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta={theta} outside [0,1]")
    return similarity(a, b, embedder) >= theta
