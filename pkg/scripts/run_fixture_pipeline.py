#!/usr/bin/env python3
"""Run the whole pipeline end-to-end on the bundled fixture corpus.

Writes every artifact (snapshot, ground truth, vectors, predictions, reports,
a triage campaign) into --out-dir and prints a short summary of each stage.
"""

import argparse
import json
import sys
from pathlib import Path

from linkforge.cli import main as linkforge

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "tests" / "fixtures"


def run(*argv: str) -> None:
    code = linkforge(list(argv))
    if code != 0:
        sys.exit(code)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="fixture_run")
    parser.add_argument("--threshold", default="58")
    parser.add_argument("--dims", default="1024")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snapshot = out / "snapshot.jsonl"
    gt = out / "gt.jsonl"
    vectors = out / "vectors.bin"
    preds = out / "preds.jsonl"

    print("== ingest ==")
    run(
        "ingest",
        "--attack", str(FIXTURES / "attack_bundle.json"),
        "--capec", str(FIXTURES / "capec_catalog.xml"),
        "--cwe", str(FIXTURES / "cwe_catalog.xml"),
        "--cve", str(FIXTURES / "cve_feed.json"),
        "--out", str(snapshot),
        "--snapshot-label", "fixture-v1",
    )
    print("== derive (technique) ==")
    run("derive", "--snapshot", str(snapshot), "--kind", "technique", "--out", str(gt))
    print("== embed (deterministic local backend) ==")
    run(
        "embed", "--snapshot", str(snapshot), "--backend", "local:deterministic",
        "--dims", args.dims, "--out", str(vectors),
    )
    print("== predict ==")
    run(
        "predict", "--vectors", str(vectors), "--gt", str(gt),
        "--threshold", args.threshold, "--out", str(preds),
    )
    print("== evaluate ==")
    run(
        "evaluate", "--preds", str(preds), "--gt", str(gt),
        "--out", str(out / "report.json"), "--csv", str(out / "overlap.csv"),
    )
    print("== roc ==")
    run(
        "roc", "--scores", str(preds), "--gt", str(gt),
        "--out", str(out / "roc.json"), "--csv", str(out / "roc.csv"),
    )
    print("== triage build ==")
    run(
        "triage", "build", "--preds", str(preds), "--gt", str(gt),
        "--campaign-id", "fixture-campaign", "--log", str(out / "events.log"),
    )

    gt_lines = [json.loads(l) for l in gt.read_text().splitlines()[1:]]
    chain_rows = [r for r in gt_lines if r["attack_id"] == "T1574.007"]
    print("\nderived chains for T1574.007:")
    for chain in chain_rows[0]["chains"]:
        print("  " + " -> ".join(chain))
    print(f"\nartifacts in {out}/")


if __name__ == "__main__":
    main()
