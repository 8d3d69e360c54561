#!/usr/bin/env python3
"""Threshold sensitivity demo on a synthetic balanced sample.

Builds a 50/50 positive/negative attack sample whose texts overlap their
linked CVE texts to a controllable degree, embeds everything with the
deterministic local backend, sweeps the threshold from 1 to 100, and prints
the AUC plus the optimal threshold (closest ROC point to (0, 1)).
"""

import argparse
import json
import random
from pathlib import Path

from linkforge.corpus.models import AttackKind
from linkforge.embedding.backend import EmbeddingBackendDescriptor, embed_batch
from linkforge.evaluation import roc_sweep, write_roc_csv
from linkforge.links import GroundTruthMap
from linkforge.similarity import ScoreTable, batch_predict
from linkforge.textprep import clean

VOCAB = [f"word{i:03d}" for i in range(400)]


def sample_text(rng: random.Random, base: list[str], overlap: float, length: int = 24) -> str:
    n_shared = int(length * overlap)
    shared = rng.sample(base, min(n_shared, len(base)))
    noise = rng.sample(VOCAB, length - len(shared))
    words = shared + noise
    rng.shuffle(words)
    return " ".join(words)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--per-class", type=int, default=50)
    parser.add_argument("--overlap", type=float, default=0.5,
                        help="token overlap between an attack and its linked CVE")
    parser.add_argument("--dims", type=int, default=2048)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", default="roc_demo.json")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    backend = EmbeddingBackendDescriptor("demo", dims=args.dims, seed=args.seed)

    entries = {}
    attack_texts = []
    cve_texts = []
    for i in range(args.per_class):
        base = rng.sample(VOCAB, 24)
        attack_id = f"T{6000 + i}"
        cve_id = f"CVE-2024-{10000 + i}"
        attack_texts.append(clean(" ".join(base), source_id=attack_id))
        cve_texts.append(clean(sample_text(rng, base, args.overlap), source_id=cve_id))
        entries[attack_id] = frozenset({cve_id})
    for i in range(args.per_class):
        attack_id = f"T{7000 + i}"
        cve_id = f"CVE-2024-{20000 + i}"
        attack_texts.append(clean(sample_text(rng, [], 0.0), source_id=attack_id))
        cve_texts.append(clean(sample_text(rng, [], 0.0), source_id=cve_id))
        entries[attack_id] = frozenset()

    attack_vectors = embed_batch(attack_texts, backend)
    cve_vectors = {
        t.source_id: v for t, v in zip(cve_texts, embed_batch(cve_texts, backend))
    }
    attacks = [(t.source_id, v) for t, v in zip(attack_texts, attack_vectors)]
    items = batch_predict(attacks, cve_vectors, threshold_pct=1.0)

    scores = ScoreTable()
    for item in items:
        scores.scores[item.attack_id] = dict(item.result.ranked)
    gt = GroundTruthMap(kind=AttackKind.TECHNIQUE, entries=entries, chains={})
    report = roc_sweep(gt, scores)

    Path(args.out).write_text(json.dumps(report.as_dict(), indent=2))
    with open(Path(args.out).with_suffix(".csv"), "w", newline="") as stream:
        write_roc_csv(report, stream)
    print(f"AUC = {report.auc:.3f}")
    print(f"optimal threshold = {report.optimal_threshold} "
          f"(distance to (0,1): {report.optimal_distance:.3f})")
    print(f"wrote {args.out} and {Path(args.out).with_suffix('.csv')}")


if __name__ == "__main__":
    main()
