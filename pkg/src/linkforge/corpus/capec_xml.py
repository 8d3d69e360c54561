"""Parse a CAPEC XML catalog into pattern entries.

Technique references come from the ATT&CK taxonomy mappings on each pattern.
Element lookup matches on local names so any catalog namespace version works.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import Counter

from linkforge import ids
from linkforge.corpus.models import AttackEntry, AttackKind, AttackSource, SkipReport
from linkforge.errors import ParseError


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_all(element: ET.Element, local_name: str) -> list[ET.Element]:
    return [e for e in element.iter() if _local(e.tag) == local_name]


def element_text(element: ET.Element | None) -> str:
    """All text under an element, flattened and whitespace-joined."""
    if element is None:
        return ""
    return " ".join("".join(element.itertext()).split())


def parse_xml_root(raw: bytes, what: str) -> ET.Element:
    try:
        return ET.fromstring(raw)
    except ET.ParseError as exc:
        line, _col = exc.position
        raise ParseError(f"malformed {what} XML: {exc.msg}", line=line) from exc


def _attack_taxonomy_refs(pattern: ET.Element) -> tuple[str, ...]:
    refs = []
    for mapping in _find_all(pattern, "Taxonomy_Mapping"):
        if mapping.get("Taxonomy_Name") != "ATTACK":
            continue
        for entry in _find_all(mapping, "Entry_ID"):
            raw_id = (entry.text or "").strip()
            if not raw_id:
                continue
            tech_id = raw_id if raw_id.startswith("T") else f"T{raw_id}"
            if ids.is_technique_id(tech_id):
                refs.append(tech_id)
    return tuple(dict.fromkeys(refs))


def parse_capec_catalog(raw: bytes) -> tuple[list[AttackEntry], SkipReport]:
    """Parse catalog bytes into Pattern entries plus a skip report."""
    root = parse_xml_root(raw, "CAPEC catalog")
    skips: Counter[str] = Counter()
    entries: list[AttackEntry] = []

    for pattern in _find_all(root, "Attack_Pattern"):
        numeric_id = pattern.get("ID", "")
        pattern_id = f"CAPEC-{numeric_id}"
        if not numeric_id or not ids.is_capec_id(pattern_id):
            skips["pattern_without_id"] += 1
            continue
        if pattern.get("Status") == "Deprecated":
            skips["deprecated"] += 1
            continue
        description_parts = [
            element_text(child)
            for child in pattern
            if _local(child.tag) in ("Description", "Extended_Description")
        ]
        description = " ".join(part for part in description_parts if part)
        if not description:
            skips["missing_description"] += 1
            continue
        entries.append(
            AttackEntry(
                id=pattern_id,
                kind=AttackKind.PATTERN,
                name=pattern.get("Name", ""),
                description=description,
                technique_refs=_attack_taxonomy_refs(pattern),
                source=AttackSource.CAPEC,
            )
        )

    return entries, SkipReport(dict(skips))
