"""Parse a CWE XML catalog into weakness entries.

``observed_cves`` comes from Observed_Examples (the explicit CWE->CVE links
shown on each CWE page) and ``related_pattern_ids`` from
Related_Attack_Patterns. Observed examples that do not reference a CVE are
skipped and counted.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import Counter

from linkforge import ids
from linkforge.corpus.capec_xml import element_text, parse_xml_root
from linkforge.corpus.models import SkipReport, WeaknessEntry


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_all(element: ET.Element, local_name: str) -> list[ET.Element]:
    return [e for e in element.iter() if _local(e.tag) == local_name]


def parse_cwe_catalog(raw: bytes) -> tuple[list[WeaknessEntry], SkipReport]:
    """Parse catalog bytes into weakness entries plus a skip report."""
    root = parse_xml_root(raw, "CWE catalog")
    skips: Counter[str] = Counter()
    entries: list[WeaknessEntry] = []

    for weakness in _find_all(root, "Weakness"):
        numeric_id = weakness.get("ID", "")
        cwe_id = f"CWE-{numeric_id}"
        if not numeric_id or not ids.is_cwe_id(cwe_id):
            skips["weakness_without_id"] += 1
            continue
        if weakness.get("Status") == "Deprecated":
            skips["deprecated"] += 1
            continue

        description = ""
        for child in weakness:
            if _local(child.tag) == "Description":
                description = element_text(child)
                break

        observed: list[str] = []
        for example in _find_all(weakness, "Observed_Example"):
            reference = ""
            for ref in _find_all(example, "Reference"):
                reference = (ref.text or "").strip()
                break
            match = ids.CVE_ANYWHERE_RE.search(reference)
            if match is None:
                skips["observed_example_without_cve"] += 1
                continue
            if match.group(0) not in observed:
                observed.append(match.group(0))

        patterns: list[str] = []
        for related in _find_all(weakness, "Related_Attack_Pattern"):
            capec_numeric = related.get("CAPEC_ID", "")
            capec_id = f"CAPEC-{capec_numeric}"
            if capec_numeric and ids.is_capec_id(capec_id) and capec_id not in patterns:
                patterns.append(capec_id)

        entries.append(
            WeaknessEntry(
                id=cwe_id,
                name=weakness.get("Name", ""),
                description=description,
                observed_cves=tuple(observed),
                related_pattern_ids=tuple(patterns),
            )
        )

    return entries, SkipReport(dict(skips))
