"""Evaluation machinery: attack-set classification, precision/recall/F1,
ROC sweep with AUC and optimal-threshold selection, and set-overlap metrics.

Classification over the attack set:

    TP  iff L(a) ∩ M(a) != {}            (predicted something that is linked)
    FP  iff L(a) != {} and M(a) == {}
    FN  iff L(a) == {} and M(a) != {}
    TN  iff both empty

The four buckets do not cover disjoint non-empty L and M; those attacks land
in an explicit ``unclassified`` bucket, reported but excluded from the
counts the metrics are computed from. All internal math is in fractions;
rendering multiplies by 100.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

from linkforge.errors import ContractError
from linkforge.links import GroundTruthMap
from linkforge.similarity import PredictionResult, ScoreTable

DEFAULT_THRESHOLDS = range(1, 101)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    unclassified: int = 0

    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn + self.unclassified


def classify_one(predicted: frozenset[str], linked: frozenset[str]) -> str:
    """Bucket one attack by its predicted set L and linked set M."""
    if predicted & linked:
        return "tp"
    if predicted and not linked:
        return "fp"
    if not predicted and linked:
        return "fn"
    if not predicted and not linked:
        return "tn"
    return "unclassified"  # disjoint non-empty L and M


def classify(gt: GroundTruthMap, preds: Sequence[PredictionResult]) -> ConfusionCounts:
    """Count buckets over the evaluated attack set."""
    counts = {"tp": 0, "fp": 0, "fn": 0, "tn": 0, "unclassified": 0}
    for pred in preds:
        if pred.attack_id not in gt.entries:
            raise ContractError(
                f"attack {pred.attack_id} is not in the ground-truth universe"
            )
        counts[classify_one(pred.predicted, gt.entries[pred.attack_id])] += 1
    return ConfusionCounts(**counts)


@dataclass
class MetricsReport:
    precision: float | None
    recall: float | None
    f1: float | None
    null_reasons: list[str] = field(default_factory=list)
    kind: str = ""
    backend: str = ""

    @classmethod
    def from_precision_recall(cls, precision: float | None, recall: float | None,
                              kind: str = "", backend: str = "") -> "MetricsReport":
        f1 = None
        reasons = []
        if precision is None:
            reasons.append("precision undefined")
        if recall is None:
            reasons.append("recall undefined")
        if precision is not None and recall is not None:
            f1 = (
                2 * precision * recall / (precision + recall)
                if precision + recall > 0
                else 0.0
            )
        return cls(precision, recall, f1, reasons, kind=kind, backend=backend)

    def as_dict(self, scale: float = 100.0) -> dict:
        def scaled(value):
            return None if value is None else value * scale

        return {
            "kind": self.kind,
            "backend": self.backend,
            "precision": scaled(self.precision),
            "recall": scaled(self.recall),
            "f1": scaled(self.f1),
            "null_reasons": list(self.null_reasons),
        }


def prf(cc: ConfusionCounts, kind: str = "", backend: str = "") -> MetricsReport:
    """Precision, recall, and their harmonic mean from confusion counts."""
    precision = cc.tp / (cc.tp + cc.fp) if cc.tp + cc.fp > 0 else None
    recall = cc.tp / (cc.tp + cc.fn) if cc.tp + cc.fn > 0 else None
    return MetricsReport.from_precision_recall(precision, recall, kind=kind, backend=backend)


@dataclass(frozen=True)
class RocPoint:
    threshold: int
    tpr: float | None
    fpr: float | None
    counts: ConfusionCounts


@dataclass
class RocReport:
    points: list[RocPoint]
    auc: float
    optimal_threshold: int
    optimal_distance: float

    def as_dict(self) -> dict:
        return {
            "auc": self.auc,
            "optimal_threshold": self.optimal_threshold,
            "optimal_distance": self.optimal_distance,
            "points": [
                {
                    "threshold": p.threshold,
                    "tpr": p.tpr,
                    "fpr": p.fpr,
                    "tp": p.counts.tp,
                    "fp": p.counts.fp,
                    "fn": p.counts.fn,
                    "tn": p.counts.tn,
                    "unclassified": p.counts.unclassified,
                }
                for p in self.points
            ],
        }


def _auc_trapezoid(points: Iterable[tuple[float, float]]) -> float:
    """Trapezoidal area over (fpr, tpr) points with (0,0) and (1,1) appended."""
    cleaned = sorted(set(points) | {(0.0, 0.0), (1.0, 1.0)})
    area = 0.0
    for (x1, y1), (x2, y2) in zip(cleaned, cleaned[1:]):
        area += (x2 - x1) * (y1 + y2) / 2.0
    return area


def roc_sweep(
    gt: GroundTruthMap,
    scores: ScoreTable,
    thresholds: Iterable[int] = DEFAULT_THRESHOLDS,
) -> RocReport:
    """Re-cut the precomputed scores at each threshold and trace the ROC.

    The optimal threshold minimizes Euclidean distance to the perfect
    classifier at (FPR, TPR) = (0, 1); ties resolve to the smallest
    threshold.
    """
    thresholds = list(thresholds)
    if not thresholds:
        raise ContractError("roc_sweep requires at least one threshold")

    attack_ids = [a for a in sorted(gt.entries) if a in scores.scores]
    points: list[RocPoint] = []
    best_threshold: int | None = None
    best_distance = math.inf

    for threshold in sorted(thresholds):
        counts = {"tp": 0, "fp": 0, "fn": 0, "tn": 0, "unclassified": 0}
        for attack_id in attack_ids:
            predicted = scores.predicted_at(attack_id, float(threshold))
            counts[classify_one(predicted, gt.entries[attack_id])] += 1
        cc = ConfusionCounts(**counts)
        tpr = cc.tp / (cc.tp + cc.fn) if cc.tp + cc.fn > 0 else None
        fpr = cc.fp / (cc.tn + cc.fp) if cc.tn + cc.fp > 0 else None
        points.append(RocPoint(threshold, tpr, fpr, cc))
        if tpr is not None and fpr is not None:
            distance = math.sqrt(fpr**2 + (1.0 - tpr) ** 2)
            if distance < best_distance:
                best_distance = distance
                best_threshold = threshold

    if best_threshold is None:
        raise ContractError("no threshold produced defined TPR and FPR")

    auc = _auc_trapezoid(
        (p.fpr, p.tpr) for p in points if p.tpr is not None and p.fpr is not None
    )
    return RocReport(points, auc, best_threshold, best_distance)


@dataclass(frozen=True)
class OverlapScores:
    jaccard: float | None
    mapping_accuracy: float | None
    detection_accuracy: float | None


@dataclass
class SetOverlapMetrics:
    per_attack: dict[str, OverlapScores]
    aggregates: dict[str, dict[str, float | None]]

    def as_dict(self) -> dict:
        return {
            "per_attack": {
                attack_id: {
                    "jaccard": s.jaccard,
                    "mapping_accuracy": s.mapping_accuracy,
                    "detection_accuracy": s.detection_accuracy,
                }
                for attack_id, s in self.per_attack.items()
            },
            "aggregates": self.aggregates,
        }


def overlap_one(predicted: frozenset[str], linked: frozenset[str]) -> OverlapScores:
    intersection = len(predicted & linked)
    union = len(predicted | linked)
    return OverlapScores(
        jaccard=intersection / union if union else None,
        mapping_accuracy=intersection / len(linked) if linked else None,
        detection_accuracy=intersection / len(predicted) if predicted else None,
    )


def set_overlap(gt: GroundTruthMap, preds: Sequence[PredictionResult]) -> SetOverlapMetrics:
    """Jaccard, mapping accuracy, and detection accuracy per attack.

    Undefined-denominator cases stay null and are excluded from the mean and
    median aggregates.
    """
    per_attack: dict[str, OverlapScores] = {}
    for pred in preds:
        linked = gt.entries.get(pred.attack_id, frozenset())
        per_attack[pred.attack_id] = overlap_one(pred.predicted, linked)

    aggregates: dict[str, dict[str, float | None]] = {}
    for metric in ("jaccard", "mapping_accuracy", "detection_accuracy"):
        values = [
            getattr(s, metric) for s in per_attack.values() if getattr(s, metric) is not None
        ]
        aggregates[metric] = {
            "mean": statistics.fmean(values) if values else None,
            "median": statistics.median(values) if values else None,
            "defined_for": len(values),
        }
    return SetOverlapMetrics(per_attack, aggregates)


@dataclass
class ComparisonReport:
    """Backend x attack-kind matrix of metric reports, best F1 flagged."""

    cells: dict[tuple[str, str], MetricsReport]  # (backend, kind) -> report
    best_by_kind: dict[str, str]  # kind -> backend with max F1

    def as_dict(self) -> dict:
        return {
            "cells": [
                {**report.as_dict(), "best_for_kind": self.best_by_kind.get(kind) == backend}
                for (backend, kind), report in sorted(self.cells.items())
            ],
            "best_by_kind": dict(self.best_by_kind),
        }


def comparison_report(cells: Mapping[tuple[str, str], MetricsReport]) -> ComparisonReport:
    if not cells:
        raise ContractError("comparison needs at least one (backend, kind) cell")
    best_by_kind: dict[str, str] = {}
    best_f1: dict[str, float] = {}
    for (backend, kind), report in sorted(cells.items()):
        if report.f1 is None:
            continue
        if kind not in best_f1 or report.f1 > best_f1[kind]:
            best_f1[kind] = report.f1
            best_by_kind[kind] = backend
    return ComparisonReport(dict(cells), best_by_kind)


def write_metrics_json(report: dict, stream: IO[str]) -> None:
    json.dump(report, stream, indent=2)
    stream.write("\n")


def write_overlap_csv(metrics: SetOverlapMetrics, stream: IO[str]) -> None:
    """Per-attack overlap distribution as CSV for external charting."""
    writer = csv.writer(stream)
    writer.writerow(["attack_id", "jaccard", "mapping_accuracy", "detection_accuracy"])
    for attack_id in sorted(metrics.per_attack):
        s = metrics.per_attack[attack_id]
        writer.writerow([attack_id, s.jaccard, s.mapping_accuracy, s.detection_accuracy])


def write_roc_csv(report: RocReport, stream: IO[str]) -> None:
    """ROC points as CSV for external charting."""
    writer = csv.writer(stream)
    writer.writerow(["threshold", "fpr", "tpr"])
    for point in report.points:
        writer.writerow([point.threshold, point.fpr, point.tpr])
