"""Command-line pipeline orchestration.

Subcommands: ingest, derive, embed, predict, evaluate, roc, export-training,
triage build|serve|export. Exit codes: 0 success, 1 usage error, 2 data or
contract error. Data errors print machine-readable JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from linkforge import __version__
from linkforge.config import BACKEND_URL_ENV, PipelineConfig, load_config
from linkforge.corpus import (
    dump_canonical,
    load_canonical,
    parse_attack_bundle,
    parse_capec_catalog,
    parse_cve_feed,
    parse_cwe_catalog,
)
from linkforge.corpus.models import AttackKind, CorpusSnapshot
from linkforge.embedding.backend import (
    LOCAL_DETERMINISTIC,
    EmbeddingBackendDescriptor,
    embed_batch,
)
from linkforge.embedding.store import load_vectors, persist_vectors
from linkforge.embedding.training import SplitSpec, export_training_data, write_training_export
from linkforge.errors import ContractError, LinkforgeError
from linkforge.evaluation import (
    classify,
    prf,
    roc_sweep,
    set_overlap,
    write_metrics_json,
    write_overlap_csv,
    write_roc_csv,
)
from linkforge.links import (
    derive_ground_truth,
    dump_ground_truth,
    extract_links,
    load_ground_truth,
    summarize_graph,
)
from linkforge.similarity import (
    PredictionResult,
    batch_predict,
    dump_predictions,
    load_predictions,
)
from linkforge.textprep import clean
from linkforge.triage.api import Predictor, create_app
from linkforge.triage.service import (
    TriageService,
    build_campaign,
    export_curated,
    write_curated_csv,
    write_curated_jsonl,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")


def _backend_from_config(config: PipelineConfig) -> EmbeddingBackendDescriptor:
    return EmbeddingBackendDescriptor(
        backend_id=config.backend_id,
        dims=config.dims,
        endpoint=config.backend,
        seed=config.seed,
    )


def _read_snapshot(path: str) -> CorpusSnapshot:
    with open(path, "r", encoding="utf-8") as stream:
        return load_canonical(stream)


def _read_gt(path: str):
    with open(path, "r", encoding="utf-8") as stream:
        return load_ground_truth(stream)


# -- subcommand implementations ---------------------------------------------


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def cmd_ingest(args, config: PipelineConfig) -> int:
    attacks, attack_skips = parse_attack_bundle(_read_input(args.attack))
    patterns, capec_skips = parse_capec_catalog(_read_input(args.capec))
    weaknesses, cwe_skips = parse_cwe_catalog(_read_input(args.cwe))
    vulnerabilities, cve_skips = parse_cve_feed(_read_input(args.cve))
    snapshot = CorpusSnapshot(
        attacks=tuple(attacks) + tuple(patterns),
        weaknesses=tuple(weaknesses),
        vulnerabilities=tuple(vulnerabilities),
        snapshot_label=args.snapshot_label,
    )
    with open(args.out, "w", encoding="utf-8") as stream:
        dump_canonical(snapshot, stream)
    summary = {
        "attacks": len(snapshot.attacks),
        "weaknesses": len(snapshot.weaknesses),
        "vulnerabilities": len(snapshot.vulnerabilities),
        "dangling_references": len(snapshot.dangling_references()),
        "skips": {
            "attack": attack_skips.counts,
            "capec": capec_skips.counts,
            "cwe": cwe_skips.counts,
            "cve": cve_skips.counts,
        },
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_derive(args, config: PipelineConfig) -> int:
    snapshot = _read_snapshot(args.snapshot)
    extraction = extract_links(snapshot)
    gt = derive_ground_truth(
        snapshot, extraction.links, args.kind, strict_resolution=not args.keep_unresolved
    )
    with open(args.out, "w", encoding="utf-8") as stream:
        dump_ground_truth(gt, stream)
    summary_path = args.summary_out or f"{args.out}.summary.json"
    summary = summarize_graph(extraction.links, snapshot).as_dict()
    summary["dangling_links"] = [list(d) for d in extraction.dangling]
    summary["linked_attacks"] = gt.linked_count()
    summary["unlinked_attacks"] = gt.unlinked_count()
    Path(summary_path).write_text(json.dumps(summary, indent=2), encoding="utf-8")
    print(
        json.dumps(
            {
                "kind": gt.kind.value,
                "linked": gt.linked_count(),
                "not_linked": gt.unlinked_count(),
                "total_links": gt.total_links(),
                "graph_summary": summary_path,
            }
        )
    )
    return EXIT_OK


def cmd_embed(args, config: PipelineConfig) -> int:
    snapshot = _read_snapshot(args.snapshot)
    backend = _backend_from_config(config)
    texts = []
    for attack in snapshot.attacks:
        texts.append(clean(attack.embedding_text(config.include_name), source_id=attack.id))
    for vuln in snapshot.vulnerabilities:
        texts.append(clean(vuln.description, source_id=vuln.id))
    vectors = embed_batch(texts, backend)
    count = persist_vectors(
        [(t.source_id, v) for t, v in zip(texts, vectors)], args.out, backend.backend_id
    )
    print(json.dumps({"vectors": count, "dims": backend.dims, "backend_id": backend.backend_id}))
    return EXIT_OK


def cmd_predict(args, config: PipelineConfig) -> int:
    gt = _read_gt(args.gt)
    vector_map = load_vectors(args.vectors)
    attack_ids = sorted(gt.entries)
    missing = [a for a in attack_ids if a not in vector_map.vectors]
    if missing:
        raise ContractError(f"vectors missing for attacks: {missing[:5]}")
    cve_vectors = {
        source_id: vec
        for source_id, vec in vector_map.vectors.items()
        if source_id.startswith("CVE-")
    }
    attacks = [(a, vector_map.vectors[a]) for a in attack_ids]
    items = batch_predict(attacks, cve_vectors, config.threshold_pct)
    failures = [i for i in items if i.error]
    if failures:
        raise ContractError(f"prediction failed for {failures[0].attack_id}: {failures[0].error}")
    results = [i.result for i in items]
    with open(args.out, "w", encoding="utf-8") as stream:
        dump_predictions(results, stream, top_k=config.top_k)
    predicted_total = sum(len(r.predicted) for r in results)
    print(
        json.dumps(
            {
                "attacks": len(results),
                "threshold_pct": config.threshold_pct,
                "predicted_pairs": predicted_total,
            }
        )
    )
    return EXIT_OK


def cmd_evaluate(args, config: PipelineConfig) -> int:
    gt = _read_gt(args.gt)
    with open(args.preds, "r", encoding="utf-8") as stream:
        preds, _scores = load_predictions(stream)
    counts = classify(gt, preds)
    metrics = prf(counts, kind=gt.kind.value)
    overlap = set_overlap(gt, preds)
    report = {
        "confusion": {
            "tp": counts.tp,
            "fp": counts.fp,
            "fn": counts.fn,
            "tn": counts.tn,
            "unclassified": counts.unclassified,
        },
        "metrics_pct": metrics.as_dict(),
        "set_overlap": overlap.as_dict(),
    }
    with open(args.out, "w", encoding="utf-8") as stream:
        write_metrics_json(report, stream)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as stream:
            write_overlap_csv(overlap, stream)
    print(json.dumps({"out": args.out, **report["confusion"]}))
    return EXIT_OK


def cmd_roc(args, config: PipelineConfig) -> int:
    gt = _read_gt(args.gt)
    with open(args.scores, "r", encoding="utf-8") as stream:
        _preds, scores = load_predictions(stream)
    report = roc_sweep(gt, scores)
    Path(args.out).write_text(json.dumps(report.as_dict(), indent=2), encoding="utf-8")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as stream:
            write_roc_csv(report, stream)
    print(
        json.dumps(
            {
                "auc": report.auc,
                "optimal_threshold": report.optimal_threshold,
                "optimal_distance": report.optimal_distance,
            }
        )
    )
    return EXIT_OK


def cmd_export_training(args, config: PipelineConfig) -> int:
    gt = _read_gt(args.gt)
    snapshot = _read_snapshot(args.snapshot)
    ratios = tuple(float(r) for r in args.split.split(","))
    if len(ratios) != 3:
        raise ContractError("--split must be three comma-separated ratios")
    spec = SplitSpec(ratios=ratios, seed=args.seed)
    export = export_training_data(gt, snapshot, spec, include_name=config.include_name)
    written = write_training_export(export, args.out_dir)
    print(json.dumps({name: str(path) for name, path in written.items()}))
    return EXIT_OK


def cmd_triage_build(args, config: PipelineConfig) -> int:
    gt = _read_gt(args.gt)
    with open(args.preds, "r", encoding="utf-8") as stream:
        preds, _scores = load_predictions(stream)
    campaign = build_campaign(
        campaign_id=args.campaign_id,
        preds=preds,
        gt=gt,
        snapshot_label=args.snapshot_label or gt.snapshot_label,
        backend_id=config.backend_id,
        threshold_pct=config.threshold_pct,
    )
    service = TriageService(args.log, quorum=config.quorum, max_rounds=config.max_rounds)
    service.add_campaign(campaign)
    print(json.dumps({"campaign_id": campaign.campaign_id, "items": len(campaign.items)}))
    return EXIT_OK


def cmd_triage_serve(args, config: PipelineConfig) -> int:
    import uvicorn

    service = TriageService(args.log, quorum=config.quorum, max_rounds=config.max_rounds)
    predictor = None
    if args.vectors:
        vector_map = load_vectors(args.vectors)
        cves = vector_map.subset(
            [s for s in vector_map.vectors if s.startswith("CVE-")]
        )
        predictor = Predictor(backend=_backend_from_config(config), cve_vectors=cves)
    texts = None
    if args.snapshot:
        snapshot = _read_snapshot(args.snapshot)
        texts = {a.id: a.description for a in snapshot.attacks}
        texts.update({v.id: v.description for v in snapshot.vulnerabilities})
    app = create_app(
        service, predictor=predictor, frontend_dir=args.frontend, texts=texts
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cmd_triage_export(args, config: PipelineConfig) -> int:
    service = TriageService(args.log)
    campaign = service.get_campaign(args.campaign_id)
    export = export_curated(campaign)
    with open(args.out, "w", encoding="utf-8") as stream:
        write_curated_jsonl(export, stream)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as stream:
            write_curated_csv(export, stream)
    print(json.dumps(export.summary))
    return EXIT_OK


# -- argument wiring ----------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="linkforge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"linkforge {__version__}")
    parser.add_argument("--config", help="key=value config file; flags win over it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse source repositories into a canonical snapshot")
    p.add_argument("--attack", required=True, help="ATT&CK STIX 2.1 JSON bundle ('-' = stdin)")
    p.add_argument("--capec", required=True, help="CAPEC XML catalog")
    p.add_argument("--cwe", required=True, help="CWE XML catalog")
    p.add_argument("--cve", required=True, help="NVD-style CVE JSON feed")
    p.add_argument("--out", required=True)
    p.add_argument("--snapshot-label", default="")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("derive", help="derive ground truth and the link-graph summary")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--kind", required=True, choices=["tactic", "technique", "procedure", "pattern"])
    p.add_argument("--out", required=True)
    p.add_argument("--summary-out")
    p.add_argument("--keep-unresolved", action="store_true",
                   help="keep CVEs cited by CWEs but absent from the feed")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("embed", help="embed all attack and CVE texts into a vector store")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--backend", help=f"endpoint URI or local:deterministic; ${BACKEND_URL_ENV} overrides")
    p.add_argument("--backend-id")
    p.add_argument("--dims", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("predict", help="rank CVEs per attack and apply the threshold")
    p.add_argument("--vectors", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--threshold", type=float, dest="threshold")
    p.add_argument("--top-k", type=int, dest="top_k", nargs="?", const=150,
                   help="truncate ranked lists for human-readable output "
                        "(bare flag means 150); omit to keep full lists for roc")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="classification and set-overlap report")
    p.add_argument("--preds", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write per-attack overlap CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("roc", help="threshold sweep: ROC points, AUC, optimal threshold")
    p.add_argument("--scores", required=True, help="prediction JSONL with full score lists")
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write ROC points CSV")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("export-training", help="export fine-tuning pairs and manifest")
    p.add_argument("--gt", required=True)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--split", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="training_export")
    p.set_defaults(func=cmd_export_training)

    triage = sub.add_parser("triage", help="build, serve, or export a review campaign")
    triage_sub = triage.add_subparsers(dest="triage_command", required=True)

    p = triage_sub.add_parser("build")
    p.add_argument("--preds", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--campaign-id", required=True)
    p.add_argument("--log", required=True, help="append-only event log path")
    p.add_argument("--snapshot-label", default="")
    p.add_argument("--threshold", type=float, dest="threshold")
    p.set_defaults(func=cmd_triage_build)

    p = triage_sub.add_parser("serve")
    p.add_argument("--log", required=True)
    p.add_argument("--snapshot", help="canonical snapshot; items then carry entity texts")
    p.add_argument("--vectors", help="vector store enabling the /predict endpoint")
    p.add_argument("--backend")
    p.add_argument("--backend-id")
    p.add_argument("--dims", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--frontend", help="directory with the built web UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8200)
    p.set_defaults(func=cmd_triage_serve)

    p = triage_sub.add_parser("export")
    p.add_argument("--log", required=True)
    p.add_argument("--campaign-id", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_triage_export)

    return parser


def _merge_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config)
    overrides = {}
    for flag, key in (
        ("threshold", "threshold_pct"),
        ("backend", "backend"),
        ("backend_id", "backend_id"),
        ("dims", "dims"),
        ("seed", "seed"),
        ("top_k", "top_k"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    return replace(config, **overrides)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return EXIT_USAGE
    try:
        config = _merge_config(args)
        return args.func(args, config)
    except FileNotFoundError as exc:
        _emit_error("io", f"{exc.filename}: not found")
        return EXIT_DATA
    except LinkforgeError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
