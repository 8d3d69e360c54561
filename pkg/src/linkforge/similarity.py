"""Cosine scoring, full-corpus ranking, and threshold cuts.

Scoring is an exact scan: every CVE vector is compared against the attack
vector with a per-pair dot product (fixed summation order, so results are
independent of any batching). The threshold is strict: a CVE whose percent
score equals the threshold is NOT predicted. Negative cosines clamp to 0 on
the percent scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Mapping

import numpy as np

from linkforge.embedding.backend import EmbeddingVector
from linkforge.errors import ContractError

DEFAULT_THRESHOLD_PCT = 58.0
DEFAULT_REPORT_TOP_K = 150


def cosine(p: EmbeddingVector, q: EmbeddingVector) -> float:
    """Cosine similarity of two vectors; symmetric, in [-1, 1].

    Clamped to the mathematical range: the floating-point dot product of two
    unit vectors can stray a few ulp outside it.
    """
    if p.dims != q.dims:
        raise ContractError(f"dims mismatch: {p.dims} vs {q.dims}")
    norm_p = float(np.linalg.norm(p.values))
    norm_q = float(np.linalg.norm(q.values))
    if norm_p == 0.0 or norm_q == 0.0:
        raise ContractError("cosine of a zero vector is undefined")
    value = float(np.dot(p.values, q.values)) / (norm_p * norm_q)
    return max(-1.0, min(1.0, value))


def percent_score(score: float) -> float:
    """Cosine mapped onto the 0-100 interface scale; negatives clamp to 0."""
    return 100.0 * max(score, 0.0)


@dataclass
class PredictionResult:
    attack_id: str
    threshold_pct: float
    ranked: list[tuple[str, float]]  # (cve_id, cosine), descending
    predicted: frozenset[str]
    empty_corpus: bool = False

    def score_of(self, cve_id: str) -> float | None:
        for candidate, score in self.ranked:
            if candidate == cve_id:
                return score
        return None


@dataclass
class BatchItem:
    attack_id: str
    result: PredictionResult | None = None
    error: str | None = None


def rank_and_cut(
    attack_id: str,
    attack_vec: EmbeddingVector,
    cve_vectors: Mapping[str, EmbeddingVector],
    threshold_pct: float,
) -> PredictionResult:
    """Rank the whole CVE corpus for one attack and apply the strict cut."""
    if not 0.0 <= threshold_pct <= 100.0:
        raise ContractError(f"threshold must be in [0, 100], got {threshold_pct}")
    if not cve_vectors:
        return PredictionResult(attack_id, threshold_pct, [], frozenset(), empty_corpus=True)
    scored = [(cve_id, cosine(attack_vec, vec)) for cve_id, vec in cve_vectors.items()]
    scored.sort(key=lambda item: (-item[1], item[0]))
    predicted = frozenset(
        cve_id for cve_id, score in scored if percent_score(score) > threshold_pct
    )
    return PredictionResult(attack_id, threshold_pct, scored, predicted)


def batch_predict(
    attacks: list[tuple[str, EmbeddingVector]],
    cve_vectors: Mapping[str, EmbeddingVector],
    threshold_pct: float,
) -> list[BatchItem]:
    """rank_and_cut per attack, input order preserved.

    Per-item failures land in the item's error slot; the batch never aborts.
    """
    items: list[BatchItem] = []
    for attack_id, vector in attacks:
        try:
            items.append(
                BatchItem(attack_id, result=rank_and_cut(attack_id, vector, cve_vectors, threshold_pct))
            )
        except ContractError as exc:
            items.append(BatchItem(attack_id, error=str(exc)))
    return items


@dataclass
class ScoreTable:
    """Per-attack score maps, the precomputed input to evaluation and ROC."""

    scores: dict[str, dict[str, float]] = field(default_factory=dict)
    threshold_pct: float = DEFAULT_THRESHOLD_PCT

    def predicted_at(self, attack_id: str, threshold_pct: float) -> frozenset[str]:
        return frozenset(
            cve_id
            for cve_id, score in self.scores.get(attack_id, {}).items()
            if percent_score(score) > threshold_pct
        )


def dump_predictions(
    results: list[PredictionResult], stream: IO[str], top_k: int | None = None
) -> None:
    """Prediction JSONL: {attack_id, threshold_pct, predictions:[...]}.

    ``top_k`` truncates the ranked list for human-readable reports; the full
    list is written by default so downstream ROC sweeps can re-cut.
    """
    for result in results:
        ranked = result.ranked if top_k is None else result.ranked[:top_k]
        record = {
            "attack_id": result.attack_id,
            "threshold_pct": result.threshold_pct,
            "predictions": [
                {"cve_id": cve_id, "score_pct": percent_score(score), "cosine": score}
                for cve_id, score in ranked
            ],
            "predicted": sorted(result.predicted),
        }
        stream.write(json.dumps(record) + "\n")


def load_predictions(stream: IO[str]) -> tuple[list[PredictionResult], ScoreTable]:
    results: list[PredictionResult] = []
    table = ScoreTable()
    for line in stream:
        if not line.strip():
            continue
        record = json.loads(line)
        ranked = [(p["cve_id"], p["cosine"]) for p in record["predictions"]]
        threshold = record["threshold_pct"]
        results.append(
            PredictionResult(
                attack_id=record["attack_id"],
                threshold_pct=threshold,
                ranked=ranked,
                predicted=frozenset(record.get("predicted", [])),
            )
        )
        table.scores[record["attack_id"]] = {c: s for c, s in ranked}
        table.threshold_pct = threshold
    return results, table
