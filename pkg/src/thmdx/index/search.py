"""Two-stage retrieval over the vector index.

Stage one pulls an oversampled candidate pool by Hamming distance on binary
codes; stage two filters by metadata and reorders by exact cosine on the
stored vectors — optionally weighted by citations, or rescored by a
cross-encoder over the top-100 prefix.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..enrich.providers import RerankProvider, cross_encoder_score
from ..errors import DimensionMismatch, InvalidK, ProviderError
from .distance import cosine, quantize
from .store import VectorIndex

logger = logging.getLogger(__name__)

POOL_FLOOR = 200
POOL_CEILING = 800
POOL_PER_RESULT = 12
RERANK_PREFIX = 100


def candidate_pool_size(k: int) -> int:
    """clamp(max(200, 12k), 200, 800) candidates ahead of filtering."""
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    return min(max(POOL_FLOOR, POOL_PER_RESULT * k), POOL_CEILING)


def composite_score(cosine_sim: float, citations: int, lam: float) -> float:
    """cosine + lambda * ln(max(citations, 1)); neutral at zero citations."""
    return cosine_sim + lam * math.log(max(citations, 1))


@dataclass
class SearchFilters:
    thm_types: Optional[set[str]] = None
    authors: Optional[set[str]] = None
    tags: Optional[set[str]] = None
    doc_id: Optional[str] = None
    year_range: Optional[tuple[int, int]] = None
    published_only: Optional[bool] = None

    def is_empty(self) -> bool:
        return all(
            value is None
            for value in (
                self.thm_types,
                self.authors,
                self.tags,
                self.doc_id,
                self.year_range,
                self.published_only,
            )
        )

    def matches(self, row: dict) -> bool:
        paper = row.get("paper", {})
        if self.thm_types is not None and row.get("thm_type") not in self.thm_types:
            return False
        if self.authors is not None and not (set(paper.get("authors", [])) & self.authors):
            return False
        if self.tags is not None and not (set(paper.get("tags", [])) & self.tags):
            return False
        if self.doc_id is not None and row.get("doc_id") != self.doc_id:
            return False
        if self.year_range is not None:
            low, high = self.year_range
            if not low <= paper.get("year", 0) <= high:
                return False
        if self.published_only and not paper.get("journal"):
            return False
        return True

    @classmethod
    def from_dict(cls, raw: Optional[dict]) -> "SearchFilters":
        if not raw:
            return cls()
        year_range = raw.get("year_range")
        return cls(
            thm_types=set(raw["thm_types"]) if raw.get("thm_types") else None,
            authors=set(raw["authors"]) if raw.get("authors") else None,
            tags=set(raw["tags"]) if raw.get("tags") else None,
            doc_id=raw.get("doc_id") or None,
            year_range=(int(year_range[0]), int(year_range[1])) if year_range else None,
            published_only=raw.get("published_only"),
        )


@dataclass
class ScoredHit:
    record_id: str
    cosine: float
    composite: float
    rank: int


def search(
    index: VectorIndex,
    query_vector,
    k: int,
    filters: Optional[SearchFilters] = None,
    citation_weight: float = 0.0,
    use_reranker: bool = False,
    reranker: Optional[RerankProvider] = None,
    query_text: str = "",
) -> list[ScoredHit]:
    """Run the full retrieval pipeline and return at most k scored hits.

    With the reranker enabled, the cross-encoder reorders the top-100
    cosine-ranked filtered candidates and citation weighting is not applied;
    if the rerank provider fails, the request falls back to cosine order.
    """
    pool = candidate_pool_size(k)
    query = np.asarray(query_vector, dtype=np.float64)
    if query.shape != (index.dimension,):
        raise DimensionMismatch(
            f"query has shape {query.shape}, index expects ({index.dimension},)"
        )

    candidate_ids = index.ann_candidates(quantize(query, index.dimension), pool)
    active = filters or SearchFilters()
    kept = [rid for rid in candidate_ids if active.matches(index.meta_row(rid))]
    if not kept:
        return []

    cosines = {rid: cosine(query, index.vector(rid)) for rid in kept}
    by_cosine = sorted(kept, key=lambda rid: (-cosines[rid], rid))

    if use_reranker:
        ordered = _rerank_order(index, by_cosine, cosines, reranker, query_text)
    else:
        scores = {
            rid: composite_score(
                cosines[rid],
                index.meta_row(rid).get("paper", {}).get("citations", 0),
                citation_weight,
            )
            for rid in kept
        }
        ordered = [(rid, scores[rid]) for rid in sorted(kept, key=lambda r: (-scores[r], r))]

    return [
        ScoredHit(record_id=rid, cosine=cosines[rid], composite=score, rank=position + 1)
        for position, (rid, score) in enumerate(ordered[:k])
    ]


def _rerank_order(
    index: VectorIndex,
    by_cosine: list[str],
    cosines: dict[str, float],
    reranker: Optional[RerankProvider],
    query_text: str,
) -> list[tuple[str, float]]:
    prefix = by_cosine[:RERANK_PREFIX]
    if reranker is None:
        logger.warning("reranker requested but not configured; using cosine order")
        return [(rid, cosines[rid]) for rid in by_cosine]
    try:
        scores = {}
        for rid in prefix:
            row = index.meta_row(rid)
            document = row.get("slogan") or row.get("body", "")
            scores[rid] = cross_encoder_score(reranker, query_text, document)
    except ProviderError as exc:
        logger.warning("reranker failed (%s); falling back to cosine order", exc)
        return [(rid, cosines[rid]) for rid in by_cosine]
    ordered = sorted(prefix, key=lambda rid: (-scores[rid], rid))
    return [(rid, scores[rid]) for rid in ordered]
