"""On-disk vector index: vectors, binary codes, graph, and metadata.

The index is a self-contained directory. Builds are single-writer and
deterministic for a fixed seed and insertion order; loaded indexes are
immutable and served concurrently.

Layout:
    manifest.json   format_version, dimension, count, hnsw_params, rng_seed,
                    checksums (sha256 per file)
    vectors.bin     count x dimension little-endian float32
    codes.bin       count x ceil(dimension/8) bytes, bit 0 of byte 0 = dim 0
    graph.bin       entry point, then per-node level + neighbor lists
    meta.jsonl      one metadata row per node, insertion order
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ChecksumMismatch, DimensionMismatch, DuplicateId, VersionMismatch
from .distance import BinaryCode, pack_codes, quantize, unpack_codes
from .hnsw import HnswGraph, HnswParams

FORMAT_VERSION = 1
_FILES = ("vectors.bin", "codes.bin", "graph.bin", "meta.jsonl")


@dataclass
class IndexEntry:
    record_id: str
    vector: np.ndarray
    code: BinaryCode
    meta_key: int = -1
    meta: dict = field(default_factory=dict)

    @classmethod
    def build(cls, record_id: str, values, meta: dict) -> "IndexEntry":
        vector = np.asarray(values, dtype=np.float32)
        return cls(record_id=record_id, vector=vector, code=quantize(vector), meta=meta)


class VectorIndex:
    def __init__(self, dimension: int, params: Optional[HnswParams] = None):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.params = params or HnswParams()
        self._record_ids: list[str] = []
        self._positions: dict[str, int] = {}
        self._vectors: list[np.ndarray] = []
        self._codes: list[int] = []
        self._meta: list[dict] = []
        self._graph = HnswGraph(self.params)
        self._frozen = False

    @property
    def count(self) -> int:
        return len(self._record_ids)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._positions

    def record_ids(self) -> list[str]:
        return list(self._record_ids)

    def insert(self, entry: IndexEntry) -> None:
        """Add one entry; rejects duplicates, wrong dimensions, and frozen
        (loaded) indexes."""
        if self._frozen:
            raise VersionMismatch("a loaded index is immutable; rebuild instead")
        if entry.record_id in self._positions:
            raise DuplicateId(entry.record_id)
        if entry.vector.shape != (self.dimension,):
            raise DimensionMismatch(
                f"vector shape {entry.vector.shape} != ({self.dimension},)"
            )
        if entry.code.dimension != self.dimension:
            raise DimensionMismatch("code dimension mismatch")

        position = len(self._record_ids)
        entry.meta_key = position
        self._record_ids.append(entry.record_id)
        self._positions[entry.record_id] = position
        self._vectors.append(np.asarray(entry.vector, dtype=np.float32))
        self._codes.append(entry.code.value)
        self._meta.append(entry.meta)
        self._graph.add(entry.code.value)

    def add(self, record_id: str, values, meta: dict) -> IndexEntry:
        entry = IndexEntry.build(record_id, values, meta)
        if len(entry.vector) != self.dimension:
            raise DimensionMismatch(
                f"vector has {len(entry.vector)} dims, index expects {self.dimension}"
            )
        self.insert(entry)
        return entry

    def vector(self, record_id: str) -> np.ndarray:
        return self._vectors[self._positions[record_id]]

    def meta_row(self, record_id: str) -> dict:
        return self._meta[self._positions[record_id]]

    def meta_rows(self) -> list[dict]:
        return list(self._meta)

    def ann_candidates(self, query_code: BinaryCode, pool: int) -> list[str]:
        """Approximate Hamming nearest ids, ascending distance then record_id."""
        if query_code.dimension != self.dimension:
            raise DimensionMismatch("query code dimension mismatch")
        if pool < 1:
            raise ValueError("pool must be >= 1")
        if self.count == 0:
            return []
        ef = max(self.params.ef_search, pool)
        found = self._graph.search(query_code.value, ef=ef, limit=pool)
        ordered = sorted((dist, self._record_ids[node]) for dist, node in found)
        return [record_id for _, record_id in ordered]

    # -- persistence -------------------------------------------------------

    def save(self, path: str | Path) -> None:
        target = Path(path)
        target.mkdir(parents=True, exist_ok=True)

        payloads: dict[str, bytes] = {}
        if self._vectors:
            matrix = np.vstack(self._vectors).astype("<f4")
        else:
            matrix = np.zeros((0, self.dimension), dtype="<f4")
        payloads["vectors.bin"] = matrix.tobytes()
        payloads["codes.bin"] = pack_codes(self._codes, self.dimension)
        payloads["graph.bin"] = self._graph.to_bytes()
        payloads["meta.jsonl"] = (
            "".join(
                json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n"
                for row in self._meta
            )
        ).encode("utf-8")

        checksums = {}
        for name, payload in payloads.items():
            (target / name).write_bytes(payload)
            checksums[name] = hashlib.sha256(payload).hexdigest()

        manifest = {
            "format_version": FORMAT_VERSION,
            "dimension": self.dimension,
            "count": self.count,
            "hnsw_params": self.params.to_dict(),
            "rng_seed": self.params.rng_seed,
            "checksums": checksums,
        }
        (target / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        source = Path(path)
        manifest = json.loads((source / "manifest.json").read_text(encoding="utf-8"))
        if manifest.get("format_version") != FORMAT_VERSION:
            raise VersionMismatch(
                f"index format {manifest.get('format_version')} != {FORMAT_VERSION}"
            )

        payloads: dict[str, bytes] = {}
        for name in _FILES:
            payload = (source / name).read_bytes()
            digest = hashlib.sha256(payload).hexdigest()
            if digest != manifest["checksums"].get(name):
                raise ChecksumMismatch(f"{name} does not match its manifest checksum")
            payloads[name] = payload

        dimension = int(manifest["dimension"])
        count = int(manifest["count"])
        params = HnswParams.from_dict(manifest["hnsw_params"])

        index = cls(dimension=dimension, params=params)
        matrix = np.frombuffer(payloads["vectors.bin"], dtype="<f4")
        if matrix.size != count * dimension:
            raise ChecksumMismatch("vectors.bin size does not match manifest count")
        matrix = matrix.reshape(count, dimension)
        index._vectors = [matrix[i] for i in range(count)]
        index._codes = unpack_codes(payloads["codes.bin"], dimension, count)

        index._meta = [
            json.loads(line)
            for line in payloads["meta.jsonl"].decode("utf-8").splitlines()
            if line
        ]
        if len(index._meta) != count:
            raise ChecksumMismatch("meta.jsonl row count does not match manifest count")
        index._record_ids = [row["record_id"] for row in index._meta]
        index._positions = {rid: i for i, rid in enumerate(index._record_ids)}
        index._graph = HnswGraph.from_bytes(payloads["graph.bin"], index._codes, params)
        index._frozen = True
        return index
