"""Query-side engine: embed the query, run the index pipeline, shape payloads.

Shared by the HTTP handlers and the offline evaluation command so both paths
return identical rankings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..enrich import (
    TextSide,
    apply_task_instruction,
    embed_provider_from_config,
    rerank_provider_from_config,
)
from ..enrich.providers import EmbedProvider, RerankProvider
from ..index import ScoredHit, SearchFilters, VectorIndex, search
from .config import ServiceConfig


def hit_payload(index: VectorIndex, hit: ScoredHit) -> dict:
    row = index.meta_row(hit.record_id)
    paper = row.get("paper", {})
    return {
        "record_id": hit.record_id,
        "name": row.get("name", ""),
        "slogan": row.get("slogan", ""),
        "body": row.get("body", ""),
        "cosine": hit.cosine,
        "composite": hit.composite,
        "rank": hit.rank,
        "paper": {
            "title": paper.get("title", ""),
            "authors": paper.get("authors", []),
            "url": paper.get("url", ""),
            "tags": paper.get("tags", []),
            "year": paper.get("year", 0),
            "journal": paper.get("journal"),
            "citations": paper.get("citations", 0),
        },
    }


@dataclass
class SearchEngine:
    index: VectorIndex
    embed_provider: EmbedProvider
    instruction_mode: str
    rerank_provider: Optional[RerankProvider] = None

    @classmethod
    def from_config(cls, config: ServiceConfig, index: VectorIndex) -> "SearchEngine":
        return cls(
            index=index,
            embed_provider=embed_provider_from_config(config.embed_provider),
            instruction_mode=config.embed_provider.instruction_mode,
            rerank_provider=(
                rerank_provider_from_config(config.rerank_provider)
                if config.rerank_provider
                else None
            ),
        )

    def embed_query(self, query_text: str) -> list[float]:
        prefixed = apply_task_instruction(query_text, TextSide.QUERY, self.instruction_mode)
        return self.embed_provider.embed(prefixed)

    def run(
        self,
        query_text: str,
        k: int,
        filters: Optional[SearchFilters] = None,
        citation_weight: float = 0.0,
        use_reranker: bool = False,
    ) -> list[ScoredHit]:
        vector = self.embed_query(query_text)
        return search(
            self.index,
            vector,
            k=k,
            filters=filters,
            citation_weight=citation_weight,
            use_reranker=use_reranker,
            reranker=self.rerank_provider,
            query_text=query_text,
        )
