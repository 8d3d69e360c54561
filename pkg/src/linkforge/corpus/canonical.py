"""Canonical JSONL interchange format consumed by every downstream module.

One JSON object per line, discriminated by ``record_type``:
``snapshot`` (single header line carrying the snapshot label), ``attack``,
``weakness``, ``vulnerability``. The field-by-field schema lives in
docs/formats.md. Round trip is identity up to record ordering.
"""

from __future__ import annotations

import json
from typing import IO, Iterable

from linkforge.corpus.models import (
    AttackEntry,
    AttackKind,
    AttackSource,
    CorpusSnapshot,
    VulnerabilityEntry,
    WeaknessEntry,
)
from linkforge.errors import ContractError, ParseError

RECORD_TYPES = {"snapshot", "attack", "weakness", "vulnerability"}


def _attack_record(entry: AttackEntry) -> dict:
    return {
        "record_type": "attack",
        "id": entry.id,
        "kind": entry.kind.value,
        "name": entry.name,
        "description": entry.description,
        "technique_refs": list(entry.technique_refs),
        "source": entry.source.value,
    }


def _weakness_record(entry: WeaknessEntry) -> dict:
    return {
        "record_type": "weakness",
        "id": entry.id,
        "name": entry.name,
        "description": entry.description,
        "observed_cves": list(entry.observed_cves),
        "related_pattern_ids": list(entry.related_pattern_ids),
    }


def _vulnerability_record(entry: VulnerabilityEntry) -> dict:
    return {
        "record_type": "vulnerability",
        "id": entry.id,
        "description": entry.description,
        "published_year": entry.published_year,
    }


def dump_canonical(snapshot: CorpusSnapshot, stream: IO[str]) -> None:
    """Write a snapshot as canonical JSONL."""
    records: Iterable[dict] = (
        [{"record_type": "snapshot", "snapshot_label": snapshot.snapshot_label}]
        + [_attack_record(a) for a in snapshot.attacks]
        + [_weakness_record(w) for w in snapshot.weaknesses]
        + [_vulnerability_record(v) for v in snapshot.vulnerabilities]
    )
    for record in records:
        stream.write(json.dumps(record, ensure_ascii=False) + "\n")


def dumps_canonical(snapshot: CorpusSnapshot) -> str:
    import io

    buffer = io.StringIO()
    dump_canonical(snapshot, buffer)
    return buffer.getvalue()


def load_canonical(stream: IO[str]) -> CorpusSnapshot:
    """Read canonical JSONL back into a snapshot.

    Raises ParseError naming the offending line for malformed JSON or an
    unknown record_type.
    """
    attacks: list[AttackEntry] = []
    weaknesses: list[WeaknessEntry] = []
    vulnerabilities: list[VulnerabilityEntry] = []
    snapshot_label = ""

    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSONL record: {exc.msg}", line=line_no) from exc
        if not isinstance(record, dict):
            raise ParseError("record is not a JSON object", line=line_no)
        record_type = record.get("record_type")
        if record_type not in RECORD_TYPES:
            raise ParseError(f"unknown record_type {record_type!r}", line=line_no)
        try:
            if record_type == "snapshot":
                snapshot_label = record.get("snapshot_label", "")
            elif record_type == "attack":
                attacks.append(
                    AttackEntry(
                        id=record["id"],
                        kind=AttackKind(record["kind"]),
                        name=record.get("name", ""),
                        description=record["description"],
                        technique_refs=tuple(record.get("technique_refs", [])),
                        source=AttackSource(record.get("source", "attack")),
                    )
                )
            elif record_type == "weakness":
                weaknesses.append(
                    WeaknessEntry(
                        id=record["id"],
                        name=record.get("name", ""),
                        description=record.get("description", ""),
                        observed_cves=tuple(record.get("observed_cves", [])),
                        related_pattern_ids=tuple(record.get("related_pattern_ids", [])),
                    )
                )
            else:
                vulnerabilities.append(
                    VulnerabilityEntry(
                        id=record["id"],
                        description=record["description"],
                        published_year=record.get("published_year", 0),
                    )
                )
        except (KeyError, ValueError, ContractError) as exc:
            raise ParseError(f"invalid {record_type} record: {exc}", line=line_no) from exc

    return CorpusSnapshot(
        attacks=tuple(attacks),
        weaknesses=tuple(weaknesses),
        vulnerabilities=tuple(vulnerabilities),
        snapshot_label=snapshot_label,
    )


def loads_canonical(text: str) -> CorpusSnapshot:
    import io

    return load_canonical(io.StringIO(text))
