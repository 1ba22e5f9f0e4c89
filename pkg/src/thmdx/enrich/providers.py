"""Model provider clients: remote HTTP backends and deterministic mocks.

Remote providers speak the prevailing JSON shapes (chat completions,
embeddings, rerank). Mocks are pure functions of their input so the whole
pipeline is reproducible offline; a ``mock:`` endpoint URL selects them.
"""

from __future__ import annotations

import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

import numpy as np
import requests

from ..errors import DimensionMismatch, NonAsciiOutput, ProviderError
from .prompts import InstructionMode

DEFAULT_MAX_PARALLEL = 8
_BACKOFF_SECONDS = (1.0, 2.0)


@dataclass
class ChatProviderConfig:
    endpoint_url: str
    model_name: str
    temperature: float = 0.2
    max_output_tokens: int = 1024
    api_key_env: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")


@dataclass
class EmbedProviderConfig:
    endpoint_url: str
    model_name: str
    dimension: int
    api_key_env: str = ""
    instruction_mode: InstructionMode = InstructionMode.PROMPTED

    def __post_init__(self) -> None:
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if isinstance(self.instruction_mode, str):
            self.instruction_mode = InstructionMode(self.instruction_mode)


@dataclass
class RerankProviderConfig:
    endpoint_url: str
    model_name: str
    api_key_env: str = ""


@dataclass
class Slogan:
    record_id: str
    strategy: str
    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("slogan text must be non-empty")
        if not self.text.isascii():
            raise ValueError("slogan text must be plain ASCII")


@dataclass
class EmbeddingVector:
    record_id: str
    values: list[float]

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding values must be finite")


@dataclass
class EmbedFailure:
    """Per-item failure marker returned by embed_batch."""

    record_id: str
    error: str


class ChatProvider(Protocol):
    def complete(self, system_text: str, user_text: str) -> str: ...


class EmbedProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> list[float]: ...


class RerankProvider(Protocol):
    def score(self, query: str, document: str) -> float: ...


def _auth_headers(api_key_env: str) -> dict[str, str]:
    import os

    headers = {"Content-Type": "application/json"}
    if api_key_env:
        key = os.environ.get(api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
    return headers


def _post_json(url: str, payload: dict, api_key_env: str, timeout: float = 60.0) -> dict:
    try:
        response = requests.post(
            url, json=payload, headers=_auth_headers(api_key_env), timeout=timeout
        )
    except requests.RequestException as exc:
        raise ProviderError(f"transport failure: {exc}") from exc
    if response.status_code != 200:
        raise ProviderError(f"HTTP {response.status_code}: {response.text[:200]}")
    try:
        return response.json()
    except ValueError as exc:
        raise ProviderError("non-JSON response body") from exc


class HttpChatProvider:
    def __init__(self, config: ChatProviderConfig):
        self.config = config

    def complete(self, system_text: str, user_text: str) -> str:
        payload = {
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_output_tokens,
        }
        body = _post_json(self.config.endpoint_url, payload, self.config.api_key_env)
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("malformed chat completion payload") from exc


class HttpEmbedProvider:
    def __init__(self, config: EmbedProviderConfig):
        self.config = config
        self.dimension = config.dimension

    def embed(self, text: str) -> list[float]:
        payload = {"model": self.config.model_name, "input": text}
        body = _post_json(self.config.endpoint_url, payload, self.config.api_key_env)
        try:
            values = body["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("malformed embedding payload") from exc
        return [float(v) for v in values]


class HttpRerankProvider:
    def __init__(self, config: RerankProviderConfig):
        self.config = config

    def score(self, query: str, document: str) -> float:
        payload = {
            "model": self.config.model_name,
            "query": query,
            "documents": [document],
        }
        body = _post_json(self.config.endpoint_url, payload, self.config.api_key_env)
        try:
            return float(body["results"][0]["relevance_score"])
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError("malformed rerank payload") from exc


_MATH_DELIMS = str.maketrans("", "", "$")


class MockChatProvider:
    """Offline slogan generator: first sentence of the theorem body with math
    delimiters stripped. Deterministic by construction."""

    def complete(self, system_text: str, user_text: str) -> str:
        body = user_text
        for line in user_text.splitlines():
            if line.startswith("theorem_body: "):
                body = line[len("theorem_body: ") :]
                break
        dot = body.find(".")
        sentence = body if dot < 0 else body[: dot + 1]
        return sentence.translate(_MATH_DELIMS).replace("\\[", "").replace("\\]", "").strip()


class MockEmbedProvider:
    """Unit-norm pseudorandom embeddings seeded by a stable text hash.

    Identical texts collide to identical vectors and distinct texts are
    near-orthogonal in high dimension, which makes exact-text retrieval
    testable end to end.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension

    def embed(self, text: str) -> list[float]:
        seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:16], "big")
        rng = np.random.default_rng(seed)
        vec = rng.standard_normal(self.dimension)
        vec /= np.linalg.norm(vec)
        return vec.tolist()


class MockRerankProvider:
    """Scores by negated absolute length difference: deterministic and
    total-order-inducing, with score(q, q) = 0 maximal."""

    def score(self, query: str, document: str) -> float:
        return -float(abs(len(query) - len(document)))


def chat_provider_from_config(config: ChatProviderConfig) -> ChatProvider:
    if config.endpoint_url.startswith("mock:"):
        return MockChatProvider()
    return HttpChatProvider(config)


def embed_provider_from_config(config: EmbedProviderConfig) -> EmbedProvider:
    if config.endpoint_url.startswith("mock:"):
        return MockEmbedProvider(config.dimension)
    return HttpEmbedProvider(config)


def rerank_provider_from_config(config: RerankProviderConfig) -> RerankProvider:
    if config.endpoint_url.startswith("mock:"):
        return MockRerankProvider()
    return HttpRerankProvider(config)


def generate_slogan(
    provider: ChatProvider,
    prompt: tuple[str, str],
    record_id: str,
    strategy: str,
    sleep: Callable[[float], None] = time.sleep,
) -> Slogan:
    """Run one slogan completion with the retry policy: one retry on transport
    error and one on non-ASCII output, backoff 1s then 2s."""
    system_text, user_text = prompt
    transport_retried = False
    ascii_retried = False
    backoff_idx = 0

    while True:
        try:
            text = provider.complete(system_text, user_text)
        except NonAsciiOutput:
            raise
        except ProviderError:
            if transport_retried:
                raise
            transport_retried = True
            sleep(_BACKOFF_SECONDS[min(backoff_idx, 1)])
            backoff_idx += 1
            continue

        text = text.rstrip()
        if not text:
            raise ProviderError("empty completion")
        if not text.isascii():
            if ascii_retried:
                raise NonAsciiOutput(f"non-ASCII slogan for {record_id!r} after retry")
            ascii_retried = True
            sleep(_BACKOFF_SECONDS[min(backoff_idx, 1)])
            backoff_idx += 1
            continue
        return Slogan(record_id=record_id, strategy=strategy, text=text)


def embed_text(
    provider: EmbedProvider,
    text: str,
    record_id: str = "",
    sleep: Callable[[float], None] = time.sleep,
) -> EmbeddingVector:
    """Embed one instruction-applied text, retrying once on transport error."""
    if not text:
        raise ValueError("cannot embed empty text")
    try:
        values = provider.embed(text)
    except ProviderError:
        sleep(_BACKOFF_SECONDS[0])
        values = provider.embed(text)
    if len(values) != provider.dimension:
        raise DimensionMismatch(
            f"provider returned {len(values)} values, expected {provider.dimension}"
        )
    return EmbeddingVector(record_id=record_id, values=values)


def embed_batch(
    provider: EmbedProvider,
    texts: Sequence[str],
    record_ids: Optional[Sequence[str]] = None,
    max_parallel: int = DEFAULT_MAX_PARALLEL,
    sleep: Callable[[float], None] = time.sleep,
) -> list[EmbeddingVector | EmbedFailure]:
    """Order-preserving batch embedding with bounded parallelism.

    A failing item is reported in place; the rest of the batch still
    completes.
    """
    if record_ids is None:
        record_ids = [""] * len(texts)
    if len(record_ids) != len(texts):
        raise ValueError("record_ids must align with texts")
    if not texts:
        return []

    def one(pair: tuple[str, str]) -> EmbeddingVector | EmbedFailure:
        text, rid = pair
        try:
            return embed_text(provider, text, record_id=rid, sleep=sleep)
        except Exception as exc:
            return EmbedFailure(record_id=rid, error=str(exc))

    workers = max(1, min(max_parallel, len(texts)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, zip(texts, record_ids)))


def cross_encoder_score(provider: RerankProvider, query: str, candidate_slogan: str) -> float:
    """Joint relevance score for a (query, slogan) pair; higher is better."""
    return provider.score(query, candidate_slogan)
