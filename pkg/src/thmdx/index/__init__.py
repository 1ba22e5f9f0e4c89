"""Binary-quantized approximate nearest-neighbor index with two-stage search."""

from .distance import BinaryCode, cosine, hamming, quantize
from .hnsw import HnswGraph, HnswParams
from .search import (
    ScoredHit,
    SearchFilters,
    candidate_pool_size,
    composite_score,
    search,
)
from .store import FORMAT_VERSION, IndexEntry, VectorIndex

__all__ = [
    "FORMAT_VERSION",
    "BinaryCode",
    "HnswGraph",
    "HnswParams",
    "IndexEntry",
    "ScoredHit",
    "SearchFilters",
    "VectorIndex",
    "candidate_pool_size",
    "composite_score",
    "cosine",
    "hamming",
    "quantize",
    "search",
]
