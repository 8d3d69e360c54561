"""Export fine-tuning data for an external sentence-transformer trainer.

Attacks are partitioned by attack id into train/validation/test with seeded
shuffling, so no attack's pairs leak across splits. Positives pair an attack
text with each linked CVE text (label 1.0); negatives sample unlinked CVEs
(label 0.0) at a configurable ratio. The manifest records everything a
trainer needs to reproduce the run, including the suggested hyperparameters
(4 epochs, 100 warmup steps, evaluation every 500 steps) as passthrough
metadata.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from linkforge.corpus.models import CorpusSnapshot
from linkforge.errors import ContractError
from linkforge.links import GroundTruthMap
from linkforge.textprep import CleanText, clean

TRAINER_HYPERPARAMETERS = {
    "loss": "CosineSimilarityLoss",
    "epochs": 4,
    "warmup_steps": 100,
    "evaluation_steps": 500,
}


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0

    def __post_init__(self):
        if any(r < 0 for r in self.ratios):
            raise ContractError("split ratios must be non-negative")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ContractError(f"split ratios must sum to 1.0, got {sum(self.ratios)}")


@dataclass(frozen=True)
class TrainingPair:
    attack_text: CleanText
    cve_text: CleanText
    label: float

    def __post_init__(self):
        if self.label not in (0.0, 1.0):
            raise ContractError(f"exported labels are binary, got {self.label}")

    def as_record(self) -> dict:
        return {
            "attack_id": self.attack_text.source_id,
            "attack_text": self.attack_text.text,
            "cve_id": self.cve_text.source_id,
            "cve_text": self.cve_text.text,
            "label": self.label,
        }


@dataclass
class TrainingExport:
    train: list[TrainingPair]
    validation: list[TrainingPair]
    test: list[TrainingPair]
    manifest: dict

    def splits(self) -> dict[str, list[TrainingPair]]:
        return {"train": self.train, "validation": self.validation, "test": self.test}


def split_attack_ids(attack_ids: list[str], spec: SplitSpec) -> tuple[list[str], list[str], list[str]]:
    """Seeded shuffle then slice; deterministic for a given (ids, spec)."""
    ordered = sorted(attack_ids)
    random.Random(spec.seed).shuffle(ordered)
    n = len(ordered)
    n_train = int(n * spec.ratios[0])
    n_val = int(n * spec.ratios[1])
    return ordered[:n_train], ordered[n_train : n_train + n_val], ordered[n_train + n_val :]


def export_training_data(
    gt: GroundTruthMap,
    snapshot: CorpusSnapshot,
    split: SplitSpec,
    include_name: bool = True,
    negatives_per_positive: int = 1,
) -> TrainingExport:
    """Build the three labeled-pair streams plus the manifest."""
    attacks = {a.id: a for a in snapshot.attacks}
    cves = {v.id: v for v in snapshot.vulnerabilities}
    eligible = [a for a in sorted(gt.entries) if a in attacks]

    train_ids, val_ids, test_ids = split_attack_ids(eligible, split)
    rng = random.Random(split.seed + 1)
    all_cves = sorted(cves)

    clean_cache: dict[str, CleanText] = {}

    def cve_text(cve_id: str) -> CleanText:
        if cve_id not in clean_cache:
            clean_cache[cve_id] = clean(cves[cve_id].description, source_id=cve_id)
        return clean_cache[cve_id]

    def pairs_for(attack_ids: list[str]) -> list[TrainingPair]:
        pairs: list[TrainingPair] = []
        for attack_id in attack_ids:
            attack = attacks[attack_id]
            attack_text = clean(attack.embedding_text(include_name), source_id=attack_id)
            linked = sorted(gt.entries[attack_id] & set(cves))
            for cve_id in linked:
                pairs.append(TrainingPair(attack_text, cve_text(cve_id), 1.0))
            pool = [c for c in all_cves if c not in gt.entries[attack_id]]
            n_negatives = max(len(linked), 1) * negatives_per_positive
            n_negatives = min(n_negatives, len(pool))
            for cve_id in rng.sample(pool, n_negatives):
                pairs.append(TrainingPair(attack_text, cve_text(cve_id), 0.0))
        return pairs

    train = pairs_for(train_ids)
    validation = pairs_for(val_ids)
    test = pairs_for(test_ids)

    warnings = []
    if eligible and (not test_ids or not val_ids):
        warnings.append("degenerate split: an evaluation split is empty")

    manifest = {
        "seed": split.seed,
        "ratios": list(split.ratios),
        "attack_kind": gt.kind.value,
        "snapshot_label": gt.snapshot_label,
        "include_name": include_name,
        "negatives_per_positive": negatives_per_positive,
        "texts_cleaned": True,
        "attack_counts": {
            "train": len(train_ids),
            "validation": len(val_ids),
            "test": len(test_ids),
        },
        "pair_counts": {
            "train": len(train),
            "validation": len(validation),
            "test": len(test),
        },
        "attack_ids": {"train": train_ids, "validation": val_ids, "test": test_ids},
        "trainer_hyperparameters": dict(TRAINER_HYPERPARAMETERS),
        "warnings": warnings,
    }
    return TrainingExport(train, validation, test, manifest)


def write_training_export(export: TrainingExport, out_dir: str | Path) -> dict[str, Path]:
    """Write train/validation/test JSONL plus manifest.json; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    for name, pairs in export.splits().items():
        path = out / f"{name}.jsonl"
        with open(path, "w", encoding="utf-8") as stream:
            for pair in pairs:
                stream.write(json.dumps(pair.as_record(), ensure_ascii=False) + "\n")
        written[name] = path
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(export.manifest, indent=2), encoding="utf-8")
    written["manifest"] = manifest_path
    return written
