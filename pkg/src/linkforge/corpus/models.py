"""Normalized entity records shared by the whole pipeline.

Snapshots are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from linkforge import ids
from linkforge.errors import ContractError


class AttackKind(str, Enum):
    TACTIC = "tactic"
    TECHNIQUE = "technique"
    SUBTECHNIQUE = "subtechnique"
    PROCEDURE = "procedure"
    PATTERN = "pattern"


class AttackSource(str, Enum):
    ATTACK = "attack"
    CAPEC = "capec"


@dataclass(frozen=True)
class AttackEntry:
    """One attack text: a Tactic, Technique, Subtechnique, Procedure or Pattern.

    ``technique_refs`` points at techniques: Pattern->Techniques and
    Procedure->parent Technique per upstream cross-references, and
    Tactic->member Techniques so tactic-level ground truth can be derived.
    """

    id: str
    kind: AttackKind
    name: str
    description: str
    technique_refs: tuple[str, ...] = ()
    source: AttackSource = AttackSource.ATTACK

    def __post_init__(self):
        if not self.id:
            raise ContractError("attack entry requires a non-empty id")
        if not self.description:
            raise ContractError(f"attack entry {self.id} requires a description")
        if self.kind is AttackKind.PATTERN and self.source is not AttackSource.CAPEC:
            raise ContractError(f"pattern {self.id} must come from CAPEC")
        if self.kind is not AttackKind.PATTERN and self.source is not AttackSource.ATTACK:
            raise ContractError(f"{self.kind.value} {self.id} must come from ATT&CK")

    def embedding_text(self, include_name: bool = True) -> str:
        """Raw text submitted to cleaning before embedding."""
        if include_name and self.name:
            return f"{self.name}. {self.description}"
        return self.description


@dataclass(frozen=True)
class WeaknessEntry:
    """A CWE record with its explicit outbound links."""

    id: str
    name: str
    description: str
    observed_cves: tuple[str, ...] = ()
    related_pattern_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if not ids.is_cwe_id(self.id):
            raise ContractError(f"weakness id {self.id!r} does not match CWE-<n>")
        for cve in self.observed_cves:
            if not ids.is_cve_id(cve):
                raise ContractError(f"{self.id}: observed example {cve!r} is not a CVE id")
        if len(set(self.observed_cves)) != len(self.observed_cves):
            raise ContractError(f"{self.id}: duplicate observed CVE ids")
        if len(set(self.related_pattern_ids)) != len(self.related_pattern_ids):
            raise ContractError(f"{self.id}: duplicate related pattern ids")


@dataclass(frozen=True)
class VulnerabilityEntry:
    """A CVE record."""

    id: str
    description: str
    published_year: int = 0

    def __post_init__(self):
        if not ids.is_cve_id(self.id):
            raise ContractError(f"vulnerability id {self.id!r} does not match CVE pattern")
        if not self.description:
            raise ContractError(f"{self.id}: description must be non-empty")
        year = ids.cve_year(self.id)
        if self.published_year == 0:
            object.__setattr__(self, "published_year", year)
        elif self.published_year != year:
            raise ContractError(
                f"{self.id}: published_year {self.published_year} inconsistent with id"
            )


@dataclass(frozen=True)
class SkipReport:
    """What a parser dropped, and why. Parsers never drop content silently."""

    counts: dict[str, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class DanglingReference:
    src_id: str
    ref_id: str
    ref_field: str


@dataclass(frozen=True)
class CorpusSnapshot:
    """All entities parsed from one set of repository files."""

    attacks: tuple[AttackEntry, ...]
    weaknesses: tuple[WeaknessEntry, ...]
    vulnerabilities: tuple[VulnerabilityEntry, ...]
    snapshot_label: str = ""

    def __post_init__(self):
        for label, entries in (
            ("attack", self.attacks),
            ("weakness", self.weaknesses),
            ("vulnerability", self.vulnerabilities),
        ):
            dupes = [i for i, n in Counter(e.id for e in entries).items() if n > 1]
            if dupes:
                raise ContractError(f"duplicate {label} ids in snapshot: {sorted(dupes)[:5]}")

    def attack_by_id(self) -> dict[str, AttackEntry]:
        return {a.id: a for a in self.attacks}

    def weakness_by_id(self) -> dict[str, WeaknessEntry]:
        return {w.id: w for w in self.weaknesses}

    def vulnerability_by_id(self) -> dict[str, VulnerabilityEntry]:
        return {v.id: v for v in self.vulnerabilities}

    def attacks_of_kind(self, kind: AttackKind) -> tuple[AttackEntry, ...]:
        """Entries of one kind. Subtechniques ride along with techniques."""
        if kind is AttackKind.TECHNIQUE:
            wanted = {AttackKind.TECHNIQUE, AttackKind.SUBTECHNIQUE}
        else:
            wanted = {kind}
        return tuple(a for a in self.attacks if a.kind in wanted)

    def dangling_references(self) -> list[DanglingReference]:
        """Cross-references that do not resolve inside this snapshot."""
        attack_ids = {a.id for a in self.attacks}
        cve_ids = {v.id for v in self.vulnerabilities}
        dangling: list[DanglingReference] = []
        for a in self.attacks:
            for ref in a.technique_refs:
                if ref not in attack_ids:
                    dangling.append(DanglingReference(a.id, ref, "technique_refs"))
        pattern_ids = {a.id for a in self.attacks if a.kind is AttackKind.PATTERN}
        for w in self.weaknesses:
            for ref in w.related_pattern_ids:
                if ref not in pattern_ids:
                    dangling.append(DanglingReference(w.id, ref, "related_pattern_ids"))
            for cve in w.observed_cves:
                if cve not in cve_ids:
                    dangling.append(DanglingReference(w.id, cve, "observed_cves"))
        return dangling
