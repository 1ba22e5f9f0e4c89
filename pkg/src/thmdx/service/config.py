"""Service configuration: one TOML file, secrets via environment variables.

Provider API keys never live in the file; each provider section names the
environment variable holding its bearer token.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..enrich import (
    ChatProviderConfig,
    EmbedProviderConfig,
    RerankProviderConfig,
    SloganStrategy,
)


@dataclass
class ServiceConfig:
    index_path: Path
    corpus_paths: list[Path]
    embed_provider: EmbedProviderConfig
    chat_provider: ChatProviderConfig
    rerank_provider: Optional[RerankProviderConfig]
    slogan_strategy: SloganStrategy
    listen_address: str
    default_k: int
    max_k: int
    feedback_log_path: Path
    work_dir: Path
    paper_meta_path: Optional[Path]
    allowed_origins: list[str] = field(default_factory=list)
    static_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if not 1 <= self.default_k <= self.max_k:
            raise ValueError("default_k must satisfy 1 <= default_k <= max_k")

    # Stage artifact locations, derived from work_dir.
    @property
    def records_path(self) -> Path:
        return self.work_dir / "records.jsonl"

    @property
    def report_path(self) -> Path:
        return self.work_dir / "ingest_report.json"

    @property
    def sections_path(self) -> Path:
        return self.work_dir / "sections.jsonl"

    @property
    def slogans_path(self) -> Path:
        return self.work_dir / "slogans.jsonl"

    @property
    def embeddings_path(self) -> Path:
        return self.work_dir / "embeddings.jsonl"


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    raw = tomllib.loads(path.read_text(encoding="utf-8"))
    base = path.parent

    def resolve(value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    service = raw.get("service", {})
    pipeline = raw.get("pipeline", {})

    embed = raw["embed_provider"]
    chat = raw.get("chat_provider", {"endpoint_url": "mock://chat", "model_name": "mock"})
    rerank = raw.get("rerank_provider")

    meta_path = pipeline.get("paper_meta_path")
    static_dir = service.get("static_dir")
    return ServiceConfig(
        index_path=resolve(service.get("index_path", "index")),
        corpus_paths=[resolve(p) for p in pipeline.get("corpus_paths", [])],
        embed_provider=EmbedProviderConfig(
            endpoint_url=embed["endpoint_url"],
            model_name=embed["model_name"],
            dimension=int(embed["dimension"]),
            api_key_env=embed.get("api_key_env", ""),
            instruction_mode=embed.get("instruction_mode", "prompted"),
        ),
        chat_provider=ChatProviderConfig(
            endpoint_url=chat["endpoint_url"],
            model_name=chat["model_name"],
            temperature=float(chat.get("temperature", 0.2)),
            max_output_tokens=int(chat.get("max_output_tokens", 1024)),
            api_key_env=chat.get("api_key_env", ""),
        ),
        rerank_provider=(
            RerankProviderConfig(
                endpoint_url=rerank["endpoint_url"],
                model_name=rerank["model_name"],
                api_key_env=rerank.get("api_key_env", ""),
            )
            if rerank
            else None
        ),
        slogan_strategy=SloganStrategy(pipeline.get("slogan_strategy", "body_only")),
        listen_address=service.get("listen_address", "127.0.0.1:8787"),
        default_k=int(service.get("default_k", 10)),
        max_k=int(service.get("max_k", 66)),
        feedback_log_path=resolve(service.get("feedback_log_path", "feedback.jsonl")),
        work_dir=resolve(pipeline.get("work_dir", "artifacts")),
        paper_meta_path=resolve(meta_path) if meta_path else None,
        allowed_origins=list(service.get("allowed_origins", [])),
        static_dir=resolve(static_dir) if static_dir else None,
    )
