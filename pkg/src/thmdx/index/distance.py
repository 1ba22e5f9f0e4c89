"""Sign quantization, Hamming distance, and cosine similarity.

Codes are kept as Python ints (bit i of the int = component i of the vector)
because a single xor + popcount is the fastest per-pair distance available to
the graph search inner loop; the packed little-endian byte form is the
on-disk layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, ZeroVector


@dataclass(frozen=True)
class BinaryCode:
    dimension: int
    value: int

    def __post_init__(self) -> None:
        if self.value < 0 or self.value >> self.dimension:
            raise ValueError("code value does not fit the stated dimension")

    @property
    def nbytes(self) -> int:
        return (self.dimension + 7) // 8

    def to_bytes(self) -> bytes:
        # Bit 0 = dimension 0 = least-significant bit of byte 0.
        return self.value.to_bytes(self.nbytes, "little")

    @classmethod
    def from_bytes(cls, raw: bytes, dimension: int) -> "BinaryCode":
        expected = (dimension + 7) // 8
        if len(raw) != expected:
            raise DimensionMismatch(f"expected {expected} code bytes, got {len(raw)}")
        return cls(dimension=dimension, value=int.from_bytes(raw, "little"))


def quantize(vector: np.ndarray | list[float], dimension: int | None = None) -> BinaryCode:
    """One bit per component: 1 iff the component is >= 0 (zero maps to 1)."""
    arr = np.asarray(vector, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch("quantize expects a 1-D vector")
    if dimension is not None and arr.shape[0] != dimension:
        raise DimensionMismatch(f"vector has {arr.shape[0]} dims, index expects {dimension}")
    bits = (arr >= 0.0).astype(np.uint8)
    packed = np.packbits(bits, bitorder="little").tobytes()
    return BinaryCode(dimension=arr.shape[0], value=int.from_bytes(packed, "little"))


def hamming(a: BinaryCode, b: BinaryCode) -> int:
    """Number of differing bit positions."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"code dims differ: {a.dimension} vs {b.dimension}")
    return (a.value ^ b.value).bit_count()


def cosine(u: np.ndarray | list[float], v: np.ndarray | list[float]) -> float:
    """dot(u, v) / (|u| |v|) in double precision."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    return float(a @ b) / (norm_a * norm_b)


def pack_codes(codes: list[int], dimension: int) -> bytes:
    """Concatenate code ints into the on-disk little-endian byte layout."""
    nbytes = (dimension + 7) // 8
    return b"".join(value.to_bytes(nbytes, "little") for value in codes)


def unpack_codes(raw: bytes, dimension: int, count: int) -> list[int]:
    nbytes = (dimension + 7) // 8
    if len(raw) != nbytes * count:
        raise DimensionMismatch("code file size does not match count x dimension")
    return [
        int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") for i in range(count)
    ]
