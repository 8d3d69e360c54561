"""Embedding backends: the HTTP wire contract and a deterministic local one.

Remote backends implement ``POST <endpoint>/embed`` with body
``{"texts": [...]}`` and response
``{"vectors": [[...]], "dims": N, "backend_id": "..."}``. The local
deterministic backend (endpoint ``local:deterministic``) is a hashed
bag-of-tokens projection used as the test oracle: identical texts embed
identically, disjoint vocabularies are near-orthogonal.

All vectors are L2-normalized client-side so cosine scoring sees unit norms.
Empty texts embed to a fixed unit basis vector flagged degenerate, keeping
cosine defined.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np
import requests

from linkforge.errors import ContractError, TransportError
from linkforge.textprep import CleanText

LOCAL_DETERMINISTIC = "local:deterministic"

DEFAULT_MAX_TOKENS = 384  # backends read roughly the first 384 words

_RETRIES = 3
_RETRY_DELAY = 0.2


@dataclass(eq=False)
class EmbeddingVector:
    dims: int
    values: np.ndarray
    normalized: bool = False
    degenerate: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.dims,):
            raise ContractError(
                f"vector has {self.values.shape} values, declared dims {self.dims}"
            )
        if self.normalized:
            norm = float(np.linalg.norm(self.values))
            if abs(norm - 1.0) > 1e-6:
                raise ContractError(f"vector flagged normalized but has norm {norm}")


@dataclass(frozen=True)
class EmbeddingBackendDescriptor:
    backend_id: str
    dims: int
    endpoint: str = LOCAL_DETERMINISTIC
    max_tokens: int = DEFAULT_MAX_TOKENS
    seed: int = 0  # only the local deterministic backend uses this

    def __post_init__(self):
        if self.dims <= 0:
            raise ContractError("backend dims must be positive")
        if self.max_tokens <= 0:
            raise ContractError("backend max_tokens must be positive")

    @property
    def is_local(self) -> bool:
        return self.endpoint == LOCAL_DETERMINISTIC


def _degenerate_vector(dims: int) -> EmbeddingVector:
    values = np.zeros(dims)
    values[0] = 1.0
    return EmbeddingVector(dims=dims, values=values, normalized=True, degenerate=True)


def _normalize(values: np.ndarray, dims: int) -> EmbeddingVector:
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        return _degenerate_vector(dims)
    return EmbeddingVector(dims=dims, values=values / norm, normalized=True)


def _token_slot(token: str, seed: int, dims: int) -> tuple[int, float]:
    digest = hashlib.blake2b(f"{seed}:{token}".encode("utf-8"), digest_size=9).digest()
    index = int.from_bytes(digest[:8], "big") % dims
    sign = 1.0 if digest[8] % 2 == 0 else -1.0
    return index, sign


def deterministic_embed(text: CleanText | str, dims: int, seed: int = 0) -> EmbeddingVector:
    """Hashed bag-of-tokens embedding; stable across runs and platforms."""
    if dims <= 0:
        raise ContractError("dims must be positive")
    raw = text.text if isinstance(text, CleanText) else text
    values = np.zeros(dims)
    for token in raw.split():
        index, sign = _token_slot(token, seed, dims)
        values[index] += sign
    return _normalize(values, dims)


def _embed_remote(texts: list[str], backend: EmbeddingBackendDescriptor) -> list[EmbeddingVector]:
    url = backend.endpoint.rstrip("/") + "/embed"
    last_error: Exception | None = None
    for attempt in range(_RETRIES):
        try:
            response = requests.post(url, json={"texts": texts}, timeout=60)
            response.raise_for_status()
            payload = response.json()
            break
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = exc
            if attempt + 1 < _RETRIES:
                time.sleep(_RETRY_DELAY * (attempt + 1))
        except requests.HTTPError as exc:
            raise TransportError(f"embedding backend returned {exc}") from exc
        except ValueError as exc:
            raise ContractError(f"embedding backend sent invalid JSON: {exc}") from exc
    else:
        raise TransportError(f"embedding backend unreachable at {url}: {last_error}")

    if payload.get("dims") != backend.dims:
        raise ContractError(
            f"backend declared dims {backend.dims} but returned {payload.get('dims')}"
        )
    if payload.get("backend_id") not in (None, backend.backend_id):
        raise ContractError(
            f"expected backend {backend.backend_id!r}, got {payload.get('backend_id')!r}"
        )
    vectors = payload.get("vectors", [])
    if len(vectors) != len(texts):
        raise ContractError(f"asked for {len(texts)} vectors, got {len(vectors)}")
    results = []
    for raw_values in vectors:
        values = np.asarray(raw_values, dtype=np.float64)
        if values.shape != (backend.dims,):
            raise ContractError(
                f"backend returned a vector of length {values.shape}, expected {backend.dims}"
            )
        results.append(_normalize(values, backend.dims))
    return results


def embed_batch(
    texts: list[CleanText], backend: EmbeddingBackendDescriptor
) -> list[EmbeddingVector]:
    """Embed each cleaned text; one unit vector per input, in input order."""
    if backend.is_local:
        return [deterministic_embed(t, backend.dims, backend.seed) for t in texts]
    remote = _embed_remote([t.text for t in texts], backend)
    # Degenerate inputs get the fixed basis vector regardless of what the
    # backend returned for them.
    return [
        _degenerate_vector(backend.dims) if not t.text else v
        for t, v in zip(texts, remote)
    ]
