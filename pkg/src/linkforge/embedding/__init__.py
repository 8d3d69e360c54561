"""Embedding backend contract, deterministic local embedder, and vector store."""

from linkforge.embedding.backend import (
    EmbeddingBackendDescriptor,
    EmbeddingVector,
    LOCAL_DETERMINISTIC,
    deterministic_embed,
    embed_batch,
)
from linkforge.embedding.store import VectorMap, iter_vectors, load_vectors, persist_vectors
from linkforge.embedding.training import SplitSpec, TrainingPair, export_training_data

__all__ = [
    "EmbeddingBackendDescriptor",
    "EmbeddingVector",
    "LOCAL_DETERMINISTIC",
    "deterministic_embed",
    "embed_batch",
    "VectorMap",
    "iter_vectors",
    "load_vectors",
    "persist_vectors",
    "SplitSpec",
    "TrainingPair",
    "export_training_data",
]
