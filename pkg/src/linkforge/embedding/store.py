"""Binary vector store.

Layout (little-endian, documented in docs/formats.md):

    magic        8 bytes  b"LINKVEC1"
    backend_id   u16 length + utf-8 bytes
    dims         u32
    count        u64
    record * count:
        source_id  u16 length + utf-8 bytes
        flags      u8  (bit0 normalized, bit1 degenerate)
        values     dims * float32

The header pins the embedding space: loading with a different expected
backend_id is a hard error so vectors from two backends can never be mixed.
Reading is streamed record by record.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from linkforge.embedding.backend import EmbeddingVector
from linkforge.errors import ContractError, ParseError

MAGIC = b"LINKVEC1"

_FLAG_NORMALIZED = 0x01
_FLAG_DEGENERATE = 0x02


@dataclass
class VectorMap:
    backend_id: str
    dims: int
    vectors: dict[str, EmbeddingVector]

    def __len__(self) -> int:
        return len(self.vectors)

    def subset(self, source_ids: Iterable[str]) -> "VectorMap":
        wanted = {s: self.vectors[s] for s in source_ids if s in self.vectors}
        return VectorMap(self.backend_id, self.dims, wanted)


def _write_str(stream: IO[bytes], value: str) -> None:
    data = value.encode("utf-8")
    if len(data) > 0xFFFF:
        raise ContractError(f"string too long for store: {value[:40]}...")
    stream.write(struct.pack("<H", len(data)))
    stream.write(data)


def _read_exact(stream: IO[bytes], n: int, what: str) -> bytes:
    data = stream.read(n)
    if len(data) != n:
        raise ParseError(f"vector store truncated while reading {what}")
    return data


def _read_str(stream: IO[bytes], what: str) -> str:
    (length,) = struct.unpack("<H", _read_exact(stream, 2, what))
    return _read_exact(stream, length, what).decode("utf-8")


def persist_vectors(
    pairs: Iterable[tuple[str, EmbeddingVector]], path: str | Path, backend_id: str
) -> int:
    """Write (source_id, vector) pairs; returns the record count."""
    pairs = list(pairs)
    seen: set[str] = set()
    dims: int | None = None
    for source_id, vector in pairs:
        if source_id in seen:
            raise ContractError(f"duplicate source_id {source_id!r}")
        seen.add(source_id)
        if dims is None:
            dims = vector.dims
        elif vector.dims != dims:
            raise ContractError(
                f"mixed dims in store: {dims} vs {vector.dims} ({source_id})"
            )
    if dims is None:
        raise ContractError("refusing to write an empty vector store")

    with open(path, "wb") as stream:
        stream.write(MAGIC)
        _write_str(stream, backend_id)
        stream.write(struct.pack("<I", dims))
        stream.write(struct.pack("<Q", len(pairs)))
        for source_id, vector in pairs:
            _write_str(stream, source_id)
            flags = (_FLAG_NORMALIZED if vector.normalized else 0) | (
                _FLAG_DEGENERATE if vector.degenerate else 0
            )
            stream.write(struct.pack("<B", flags))
            stream.write(np.asarray(vector.values, dtype="<f4").tobytes())
    return len(pairs)


def read_header(stream: IO[bytes]) -> tuple[str, int, int]:
    magic = _read_exact(stream, len(MAGIC), "magic")
    if magic != MAGIC:
        raise ParseError(f"not a vector store (magic {magic!r})")
    backend_id = _read_str(stream, "backend_id")
    (dims,) = struct.unpack("<I", _read_exact(stream, 4, "dims"))
    (count,) = struct.unpack("<Q", _read_exact(stream, 8, "count"))
    return backend_id, dims, count


def iter_vectors(
    path: str | Path, expected_backend_id: str | None = None
) -> Iterator[tuple[str, EmbeddingVector]]:
    """Stream records without materializing the whole store."""
    with open(path, "rb") as stream:
        backend_id, dims, count = read_header(stream)
        if expected_backend_id is not None and backend_id != expected_backend_id:
            raise ContractError(
                f"store was written by backend {backend_id!r}, "
                f"expected {expected_backend_id!r}"
            )
        record_bytes = dims * 4
        for _ in range(count):
            source_id = _read_str(stream, "source_id")
            (flags,) = struct.unpack("<B", _read_exact(stream, 1, "flags"))
            values = np.frombuffer(
                _read_exact(stream, record_bytes, f"values of {source_id}"), dtype="<f4"
            ).astype(np.float64)
            yield source_id, EmbeddingVector(
                dims=dims,
                values=values,
                normalized=bool(flags & _FLAG_NORMALIZED),
                degenerate=bool(flags & _FLAG_DEGENERATE),
            )


def load_vectors(path: str | Path, expected_backend_id: str | None = None) -> VectorMap:
    """Load a whole store into a map keyed by source_id."""
    with open(path, "rb") as stream:
        backend_id, dims, _count = read_header(stream)
    if expected_backend_id is not None and backend_id != expected_backend_id:
        raise ContractError(
            f"store was written by backend {backend_id!r}, expected {expected_backend_id!r}"
        )
    vectors = dict(iter_vectors(path))
    return VectorMap(backend_id=backend_id, dims=dims, vectors=vectors)
