"""Parse an ATT&CK STIX 2.1 JSON bundle into attack entries.

Tactics come from ``x-mitre-tactic`` objects, techniques and subtechniques
from ``attack-pattern`` objects, and procedures from the description text of
``uses`` relationships that target a technique (the "procedure examples"
shown on each technique page). Revoked or deprecated objects are excluded.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Any

from linkforge import ids
from linkforge.corpus.models import AttackEntry, AttackKind, SkipReport
from linkforge.errors import ParseError

KNOWN_TYPES = {"attack-pattern", "x-mitre-tactic", "relationship"}


def _external_id(obj: dict[str, Any], source_name: str = "mitre-attack") -> str | None:
    for ref in obj.get("external_references", []):
        if ref.get("source_name") == source_name and ref.get("external_id"):
            return ref["external_id"]
    return None


def _is_retired(obj: dict[str, Any]) -> bool:
    return bool(obj.get("revoked")) or bool(obj.get("x_mitre_deprecated"))


def _kill_chain_phases(obj: dict[str, Any]) -> list[str]:
    phases = []
    for phase in obj.get("kill_chain_phases", []):
        if phase.get("kill_chain_name") == "mitre-attack" and phase.get("phase_name"):
            phases.append(phase["phase_name"])
    return phases


def parse_attack_bundle(raw: bytes) -> tuple[list[AttackEntry], SkipReport]:
    """Parse bundle bytes; returns entries plus a report of skipped objects."""
    try:
        bundle = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError(f"bundle is not UTF-8: {exc.reason}", byte_offset=exc.start) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed STIX bundle JSON: {exc.msg}", byte_offset=exc.pos) from exc
    if not isinstance(bundle, dict):
        raise ParseError("STIX bundle must be a JSON object", byte_offset=0)

    objects = bundle.get("objects", [])
    skips: Counter[str] = Counter()

    tactics: list[tuple[dict[str, Any], str]] = []          # (object, tactic id)
    techniques: dict[str, AttackEntry] = {}                 # stix id -> entry
    technique_phases: dict[str, list[str]] = {}             # attack id -> phase names
    uses_relationships: list[dict[str, Any]] = []

    for obj in objects:
        obj_type = obj.get("type", "")
        if obj_type not in KNOWN_TYPES:
            skips[f"unknown_type:{obj_type or '<missing>'}"] += 1
            continue
        if _is_retired(obj):
            skips["revoked_or_deprecated"] += 1
            continue
        if obj_type == "x-mitre-tactic":
            tactic_id = _external_id(obj)
            if not tactic_id or not ids.is_tactic_id(tactic_id):
                skips["tactic_without_id"] += 1
                continue
            if not obj.get("description"):
                skips["missing_description"] += 1
                continue
            tactics.append((obj, tactic_id))
        elif obj_type == "attack-pattern":
            tech_id = _external_id(obj)
            if not tech_id or not ids.is_technique_id(tech_id):
                skips["technique_without_id"] += 1
                continue
            if not obj.get("description"):
                skips["missing_description"] += 1
                continue
            kind = (
                AttackKind.SUBTECHNIQUE
                if obj.get("x_mitre_is_subtechnique") or "." in tech_id
                else AttackKind.TECHNIQUE
            )
            entry = AttackEntry(
                id=tech_id,
                kind=kind,
                name=obj.get("name", ""),
                description=obj["description"],
            )
            techniques[obj["id"]] = entry
            technique_phases[tech_id] = _kill_chain_phases(obj)
        else:
            if obj.get("relationship_type") == "uses":
                uses_relationships.append(obj)
            else:
                skips[f"relationship:{obj.get('relationship_type', '<missing>')}"] += 1

    entries: list[AttackEntry] = []

    for obj, tactic_id in tactics:
        shortname = obj.get("x_mitre_shortname", "")
        members = tuple(
            sorted(tid for tid, phases in technique_phases.items() if shortname in phases)
        )
        entries.append(
            AttackEntry(
                id=tactic_id,
                kind=AttackKind.TACTIC,
                name=obj.get("name", ""),
                description=obj["description"],
                technique_refs=members,
            )
        )

    entries.extend(techniques[sid] for sid in techniques)

    # Procedure examples: "uses" relationship descriptions, numbered per
    # technique in document order.
    ordinals: Counter[str] = Counter()
    for rel in uses_relationships:
        target = rel.get("target_ref", "")
        parent = techniques.get(target)
        if parent is None:
            skips["uses_target_not_a_technique"] += 1
            continue
        description = rel.get("description", "")
        if not description:
            skips["uses_without_description"] += 1
            continue
        ordinals[parent.id] += 1
        entries.append(
            AttackEntry(
                id=f"PROC-{parent.id}-{ordinals[parent.id]}",
                kind=AttackKind.PROCEDURE,
                name=parent.name,
                description=description,
                technique_refs=(parent.id,),
            )
        )

    return entries, SkipReport(dict(skips))
