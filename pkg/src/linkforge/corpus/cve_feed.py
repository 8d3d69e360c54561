"""Parse an NVD-style CVE JSON feed into vulnerability entries.

Accepts both the legacy 1.1 feed layout (``CVE_Items``) and the 2.0 API
layout (``vulnerabilities``). Rejected/reserved records and records without
an English description are skipped and counted.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Any

from linkforge import ids
from linkforge.corpus.models import SkipReport, VulnerabilityEntry
from linkforge.errors import ParseError

_REJECT_MARKERS = ("** REJECT **", "** RESERVED **")


def _english_description(descriptions: list[dict[str, Any]]) -> str:
    for entry in descriptions:
        if entry.get("lang") == "en" and entry.get("value"):
            return entry["value"]
    return ""


def _record_fields(item: dict[str, Any]) -> tuple[str, str, str]:
    """Normalize one feed record to (cve_id, description, status)."""
    cve = item.get("cve", item)
    if "CVE_data_meta" in cve:  # 1.1 feed
        cve_id = cve.get("CVE_data_meta", {}).get("ID", "")
        description = _english_description(
            cve.get("description", {}).get("description_data", [])
        )
        status = ""
    else:  # 2.0 API
        cve_id = cve.get("id", "")
        description = _english_description(cve.get("descriptions", []))
        status = cve.get("vulnStatus", "")
    return cve_id, description, status


def parse_cve_feed(raw: bytes) -> tuple[list[VulnerabilityEntry], SkipReport]:
    """Parse feed bytes into vulnerability entries plus a skip report."""
    try:
        feed = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError(f"CVE feed is not UTF-8: {exc.reason}", byte_offset=exc.start) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed CVE feed JSON: {exc.msg}", byte_offset=exc.pos) from exc
    if not isinstance(feed, dict):
        raise ParseError("CVE feed must be a JSON object", byte_offset=0)

    items = feed.get("CVE_Items")
    if items is None:
        items = feed.get("vulnerabilities", [])

    skips: Counter[str] = Counter()
    entries: list[VulnerabilityEntry] = []
    for item in items:
        cve_id, description, status = _record_fields(item)
        if not cve_id or not ids.is_cve_id(cve_id):
            skips["record_without_cve_id"] += 1
            continue
        if status in ("Rejected", "Reserved") or any(
            description.startswith(m) for m in _REJECT_MARKERS
        ):
            skips["rejected_or_reserved"] += 1
            continue
        if not description:
            skips["missing_description"] += 1
            continue
        entries.append(VulnerabilityEntry(id=cve_id, description=description))

    return entries, SkipReport(dict(skips))
