"""Explicit cross-repository links and ground-truth derivation.

The ground-truth map follows the chain attack -> pattern -> CWE -> CVE built
from explicit links: patterns carry technique mappings, CWE pages list
related patterns, and CWE observed examples cite CVEs. Tactics inherit the
union of their techniques' sets; procedures inherit their parent technique.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable

from linkforge.corpus.models import AttackKind, CorpusSnapshot
from linkforge.errors import ContractError, ParseError


class FoundOn(str, Enum):
    CWE_PAGE = "cwe_page"
    CAPEC_PAGE = "capec_page"
    ATTACK_PAGE = "attack_page"


class LinkKind(str, Enum):
    PATTERN_TO_TECHNIQUE = "pattern_to_technique"
    CWE_TO_PATTERN = "cwe_to_pattern"
    CWE_TO_CVE = "cwe_to_cve"
    TACTIC_TO_TECHNIQUE = "tactic_to_technique"
    TECHNIQUE_TO_PROCEDURE = "technique_to_procedure"


_EXPECTED_PAGE = {
    LinkKind.PATTERN_TO_TECHNIQUE: FoundOn.CAPEC_PAGE,
    LinkKind.CWE_TO_PATTERN: FoundOn.CWE_PAGE,
    LinkKind.CWE_TO_CVE: FoundOn.CWE_PAGE,
    LinkKind.TACTIC_TO_TECHNIQUE: FoundOn.ATTACK_PAGE,
    LinkKind.TECHNIQUE_TO_PROCEDURE: FoundOn.ATTACK_PAGE,
}


@dataclass(frozen=True)
class ExplicitLink:
    src_id: str
    dst_id: str
    found_on: FoundOn
    link_kind: LinkKind

    def __post_init__(self):
        if _EXPECTED_PAGE[self.link_kind] is not self.found_on:
            raise ContractError(
                f"{self.link_kind.value} link cannot be found on {self.found_on.value}"
            )


@dataclass(frozen=True)
class LinkExtraction:
    links: tuple[ExplicitLink, ...]
    dangling: tuple[tuple[str, str, str], ...]  # (src_id, missing dst_id, link kind)


@dataclass
class GroundTruthMap:
    """M(a): attack id -> linked CVE ids, with full derivation chains."""

    kind: AttackKind
    entries: dict[str, frozenset[str]]
    chains: dict[str, list[list[str]]]
    snapshot_label: str = ""
    dropped_cves: dict[str, list[str]] = field(default_factory=dict)

    def linked_count(self) -> int:
        return sum(1 for cves in self.entries.values() if cves)

    def unlinked_count(self) -> int:
        return sum(1 for cves in self.entries.values() if not cves)

    def total_links(self) -> int:
        return sum(len(cves) for cves in self.entries.values())


@dataclass(frozen=True)
class LinkGraphSummary:
    node_counts: dict[str, int]
    edge_counts: dict[str, int]
    floating_counts: dict[str, int]

    def as_dict(self) -> dict:
        return {
            "node_counts": dict(self.node_counts),
            "edge_counts": dict(self.edge_counts),
            "floating_counts": dict(self.floating_counts),
        }


def extract_links(snapshot: CorpusSnapshot) -> LinkExtraction:
    """Collect every explicit link in the snapshot.

    Links whose destination does not resolve in the snapshot are recorded as
    dangling and not emitted, so derivation only walks resolvable edges.
    """
    attack_ids = {a.id for a in snapshot.attacks}
    pattern_ids = {a.id for a in snapshot.attacks if a.kind is AttackKind.PATTERN}
    cve_ids = {v.id for v in snapshot.vulnerabilities}

    links: list[ExplicitLink] = []
    dangling: list[tuple[str, str, str]] = []

    def emit(src: str, dst: str, kind: LinkKind, resolvable: bool) -> None:
        if resolvable:
            links.append(ExplicitLink(src, dst, _EXPECTED_PAGE[kind], kind))
        else:
            dangling.append((src, dst, kind.value))

    for attack in snapshot.attacks:
        if attack.kind is AttackKind.PATTERN:
            for tech in attack.technique_refs:
                emit(attack.id, tech, LinkKind.PATTERN_TO_TECHNIQUE, tech in attack_ids)
        elif attack.kind is AttackKind.TACTIC:
            for tech in attack.technique_refs:
                emit(attack.id, tech, LinkKind.TACTIC_TO_TECHNIQUE, tech in attack_ids)
        elif attack.kind is AttackKind.PROCEDURE:
            for tech in attack.technique_refs:
                emit(tech, attack.id, LinkKind.TECHNIQUE_TO_PROCEDURE, tech in attack_ids)

    for weakness in snapshot.weaknesses:
        for pattern in weakness.related_pattern_ids:
            emit(weakness.id, pattern, LinkKind.CWE_TO_PATTERN, pattern in pattern_ids)
        for cve in weakness.observed_cves:
            # CWE observed examples may cite CVEs absent from the feed; they
            # stay extractable here and strict resolution is applied during
            # derivation.
            emit(weakness.id, cve, LinkKind.CWE_TO_CVE, True)
            if cve not in cve_ids:
                dangling.append((weakness.id, cve, "cwe_to_cve_unresolved"))

    return LinkExtraction(tuple(links), tuple(dangling))


def _index_links(links: Iterable[ExplicitLink]):
    patterns_of_technique: dict[str, set[str]] = {}
    cwes_of_pattern: dict[str, set[str]] = {}
    cves_of_cwe: dict[str, set[str]] = {}
    for link in links:
        if link.link_kind is LinkKind.PATTERN_TO_TECHNIQUE:
            patterns_of_technique.setdefault(link.dst_id, set()).add(link.src_id)
        elif link.link_kind is LinkKind.CWE_TO_PATTERN:
            cwes_of_pattern.setdefault(link.dst_id, set()).add(link.src_id)
        elif link.link_kind is LinkKind.CWE_TO_CVE:
            cves_of_cwe.setdefault(link.src_id, set()).add(link.dst_id)
    return patterns_of_technique, cwes_of_pattern, cves_of_cwe


def derive_ground_truth(
    snapshot: CorpusSnapshot,
    links: Iterable[ExplicitLink],
    kind: AttackKind | str,
    strict_resolution: bool = True,
) -> GroundTruthMap:
    """Build M(a) for every attack of the given kind.

    With ``strict_resolution`` (the default) CVEs cited by a CWE but absent
    from the snapshot's feed are dropped and reported, since the evaluation
    needs resolvable descriptions.
    """
    if isinstance(kind, str):
        try:
            kind = AttackKind(kind)
        except ValueError as exc:
            raise ContractError(f"unknown attack kind {kind!r}") from exc
    if kind is AttackKind.SUBTECHNIQUE:
        raise ContractError("subtechniques are derived under kind=technique")

    patterns_of_technique, cwes_of_pattern, cves_of_cwe = _index_links(links)
    known_cves = {v.id for v in snapshot.vulnerabilities}

    def technique_chains(technique_id: str) -> list[list[str]]:
        chains = []
        for pattern in sorted(patterns_of_technique.get(technique_id, ())):
            for cwe in sorted(cwes_of_pattern.get(pattern, ())):
                for cve in sorted(cves_of_cwe.get(cwe, ())):
                    chains.append([technique_id, pattern, cwe, cve])
        return chains

    def pattern_chains(pattern_id: str) -> list[list[str]]:
        chains = []
        for cwe in sorted(cwes_of_pattern.get(pattern_id, ())):
            for cve in sorted(cves_of_cwe.get(cwe, ())):
                chains.append([pattern_id, cwe, cve])
        return chains

    entries: dict[str, frozenset[str]] = {}
    chain_map: dict[str, list[list[str]]] = {}
    dropped: dict[str, list[str]] = {}

    for attack in snapshot.attacks_of_kind(kind):
        if kind is AttackKind.TECHNIQUE:
            chains = technique_chains(attack.id)
        elif kind is AttackKind.PATTERN:
            chains = pattern_chains(attack.id)
        elif kind is AttackKind.TACTIC:
            chains = [
                [attack.id] + chain
                for tech in sorted(attack.technique_refs)
                for chain in technique_chains(tech)
            ]
        else:  # procedure inherits its parent technique
            chains = [
                [attack.id] + chain
                for tech in sorted(attack.technique_refs)
                for chain in technique_chains(tech)
            ]

        # Deduplicate by full-chain tuple; set semantics on the CVE column.
        unique = list(dict.fromkeys(tuple(c) for c in chains))
        if strict_resolution:
            lost = sorted({c[-1] for c in unique} - known_cves)
            if lost:
                dropped[attack.id] = lost
            unique = [c for c in unique if c[-1] in known_cves]
        entries[attack.id] = frozenset(c[-1] for c in unique)
        chain_map[attack.id] = [list(c) for c in unique]

    return GroundTruthMap(
        kind=kind,
        entries=entries,
        chains=chain_map,
        snapshot_label=snapshot.snapshot_label,
        dropped_cves=dropped,
    )


def summarize_graph(links: Iterable[ExplicitLink], snapshot: CorpusSnapshot) -> LinkGraphSummary:
    """Node, edge, and floating-entry counts for the explicit-link graph."""
    links = list(links)
    node_classes: dict[str, str] = {}
    for attack in snapshot.attacks:
        node_classes[attack.id] = attack.kind.value
    for weakness in snapshot.weaknesses:
        node_classes[weakness.id] = "weakness"
    for vuln in snapshot.vulnerabilities:
        node_classes[vuln.id] = "vulnerability"

    node_counts: dict[str, int] = {}
    for cls in node_classes.values():
        node_counts[cls] = node_counts.get(cls, 0) + 1

    edge_counts: dict[str, int] = {}
    touched: set[str] = set()
    for link in links:
        edge_counts[link.link_kind.value] = edge_counts.get(link.link_kind.value, 0) + 1
        touched.add(link.src_id)
        touched.add(link.dst_id)

    floating_counts: dict[str, int] = {cls: 0 for cls in node_counts}
    for node_id, cls in node_classes.items():
        if node_id not in touched:
            floating_counts[cls] += 1

    return LinkGraphSummary(node_counts, edge_counts, floating_counts)


def dump_ground_truth(gt: GroundTruthMap, stream: IO[str]) -> None:
    """Ground-truth JSONL: header line, then {attack_id, cve_ids, chains}."""
    header = {
        "record_type": "ground_truth",
        "kind": gt.kind.value,
        "snapshot_label": gt.snapshot_label,
    }
    stream.write(json.dumps(header) + "\n")
    for attack_id in sorted(gt.entries):
        record = {
            "attack_id": attack_id,
            "cve_ids": sorted(gt.entries[attack_id]),
            "chains": gt.chains.get(attack_id, []),
        }
        stream.write(json.dumps(record) + "\n")


def load_ground_truth(stream: IO[str]) -> GroundTruthMap:
    kind = AttackKind.TECHNIQUE
    snapshot_label = ""
    entries: dict[str, frozenset[str]] = {}
    chains: dict[str, list[list[str]]] = {}
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed ground-truth record: {exc.msg}", line=line_no) from exc
        if record.get("record_type") == "ground_truth":
            kind = AttackKind(record["kind"])
            snapshot_label = record.get("snapshot_label", "")
            continue
        attack_id = record["attack_id"]
        entries[attack_id] = frozenset(record.get("cve_ids", []))
        chains[attack_id] = [list(c) for c in record.get("chains", [])]
    return GroundTruthMap(kind=kind, entries=entries, chains=chains, snapshot_label=snapshot_label)
