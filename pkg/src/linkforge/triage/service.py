"""Triage state: campaign building, review submission, event log, export.

Persistence is an append-only event log replayed into memory on open. Each
event is one length-prefixed JSON object (4-byte big-endian length, then
UTF-8 JSON; format documented in docs/formats.md). A single lock serializes
writers; readers see consistent in-memory state.
"""

from __future__ import annotations

import datetime as dt
import json
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator, Sequence

from linkforge.errors import ContractError, ParseError
from linkforge.links import GroundTruthMap
from linkforge.similarity import PredictionResult, percent_score
from linkforge.triage.models import (
    DEFAULT_MAX_ROUNDS,
    DEFAULT_QUORUM,
    Review,
    TriageCampaign,
    TriageItem,
    review_status,
)


class DuplicateVoteError(ContractError):
    """The reviewer already voted on this item in this round."""


class VersionConflictError(ContractError):
    """The caller's item version is stale."""


class UnknownItemError(ContractError):
    pass


def build_campaign(
    campaign_id: str,
    preds: Sequence[PredictionResult],
    gt: GroundTruthMap,
    snapshot_label: str,
    backend_id: str,
    threshold_pct: float,
    created_at: str | None = None,
) -> TriageCampaign:
    """Queue every predicted-but-unlinked (attack, CVE) pair for review."""
    if gt.snapshot_label and snapshot_label and gt.snapshot_label != snapshot_label:
        raise ContractError(
            f"predictions are from snapshot {snapshot_label!r} but ground truth "
            f"is from {gt.snapshot_label!r}"
        )
    candidates: list[TriageItem] = []
    for pred in preds:
        linked = gt.entries.get(pred.attack_id, frozenset())
        scores = dict(pred.ranked)
        for cve_id in sorted(pred.predicted - linked):
            candidates.append(
                TriageItem(
                    item_id="",
                    attack_id=pred.attack_id,
                    cve_id=cve_id,
                    score_pct=percent_score(scores.get(cve_id, 0.0)),
                )
            )
    candidates.sort(key=lambda i: (-i.score_pct, i.attack_id, i.cve_id))
    items: dict[str, TriageItem] = {}
    for index, item in enumerate(candidates):
        item.item_id = f"{campaign_id}-{index:05d}"
        items[item.item_id] = item
    return TriageCampaign(
        campaign_id=campaign_id,
        snapshot_label=snapshot_label,
        backend_id=backend_id,
        threshold_pct=threshold_pct,
        items=items,
        created_at=created_at or dt.datetime.now(dt.timezone.utc).isoformat(),
        gt_link_count=gt.total_links(),
    )


@dataclass
class CuratedExport:
    records: list[dict]
    summary: dict

    def as_dict(self) -> dict:
        return {"records": self.records, "summary": self.summary}


def export_curated(campaign: TriageCampaign) -> CuratedExport:
    """Accepted items become curated candidate links; side-effect free."""
    records = []
    for item in campaign.items_sorted():
        if item.status != "accepted":
            continue
        records.append(
            {
                "attack_id": item.attack_id,
                "cve_id": item.cve_id,
                "score_pct": item.score_pct,
                "reviewers": sorted({r.reviewer_id for r in item.reviews if r.verdict == "link"}),
            }
        )
    counts = campaign.status_counts()
    coverage = (
        100.0 * counts["accepted"] / campaign.gt_link_count if campaign.gt_link_count else None
    )
    summary = {
        "campaign_id": campaign.campaign_id,
        "total_items": len(campaign.items),
        "accepted": counts["accepted"],
        "rejected": counts["rejected"],
        "pending": counts["pending"],
        "contested": counts["contested"],
        "gt_link_count": campaign.gt_link_count,
        "coverage_delta_pct": coverage,
    }
    return CuratedExport(records, summary)


def write_curated_jsonl(export: CuratedExport, stream: IO[str]) -> None:
    stream.write(json.dumps({"record_type": "summary", **export.summary}) + "\n")
    for record in export.records:
        stream.write(json.dumps(record) + "\n")


def write_curated_csv(export: CuratedExport, stream: IO[str]) -> None:
    import csv

    writer = csv.writer(stream)
    writer.writerow(["attack_id", "cve_id", "score_pct", "reviewers"])
    for record in export.records:
        writer.writerow(
            [record["attack_id"], record["cve_id"], record["score_pct"],
             ";".join(record["reviewers"])]
        )


def _write_event(stream: IO[bytes], event: dict) -> None:
    payload = json.dumps(event, ensure_ascii=False).encode("utf-8")
    stream.write(struct.pack(">I", len(payload)))
    stream.write(payload)


def read_events(path: str | Path) -> Iterator[dict]:
    """Stream events from a length-prefixed log file."""
    with open(path, "rb") as stream:
        while True:
            header = stream.read(4)
            if not header:
                return
            if len(header) != 4:
                raise ParseError("event log truncated in a length prefix")
            (length,) = struct.unpack(">I", header)
            payload = stream.read(length)
            if len(payload) != length:
                raise ParseError("event log truncated inside an event")
            yield json.loads(payload.decode("utf-8"))


class TriageService:
    """Event-sourced campaign state with a single serialized writer."""

    def __init__(
        self,
        log_path: str | Path | None = None,
        quorum: int = DEFAULT_QUORUM,
        max_rounds: int = DEFAULT_MAX_ROUNDS,
    ):
        self.log_path = Path(log_path) if log_path else None
        self.quorum = quorum
        self.max_rounds = max_rounds
        self.campaigns: dict[str, TriageCampaign] = {}
        self._item_index: dict[str, str] = {}  # item_id -> campaign_id
        self._lock = threading.Lock()
        if self.log_path and self.log_path.exists():
            for event in read_events(self.log_path):
                self._apply(event)

    # -- event handling ----------------------------------------------------

    def _append(self, event: dict) -> None:
        if self.log_path is None:
            return
        with open(self.log_path, "ab") as stream:
            _write_event(stream, event)

    def _apply(self, event: dict) -> None:
        kind = event.get("event")
        if kind == "campaign_created":
            self._apply_campaign(event)
        elif kind == "review_submitted":
            self._apply_review(event)
        else:
            raise ParseError(f"unknown event type {kind!r} in log")

    def _apply_campaign(self, event: dict) -> None:
        data = event["campaign"]
        items: dict[str, TriageItem] = {}
        for record in data["items"]:
            item = TriageItem(
                item_id=record["item_id"],
                attack_id=record["attack_id"],
                cve_id=record["cve_id"],
                score_pct=record["score_pct"],
            )
            items[item.item_id] = item
            self._item_index[item.item_id] = data["campaign_id"]
        self.campaigns[data["campaign_id"]] = TriageCampaign(
            campaign_id=data["campaign_id"],
            snapshot_label=data.get("snapshot_label", ""),
            backend_id=data.get("backend_id", ""),
            threshold_pct=data.get("threshold_pct", 0.0),
            items=items,
            created_at=data.get("created_at", ""),
            gt_link_count=data.get("gt_link_count", 0),
        )

    def _apply_review(self, event: dict) -> None:
        item = self._find_item(event["item_id"])
        item.reviews.append(
            Review(
                reviewer_id=event["reviewer_id"],
                verdict=event["verdict"],
                round=event["round"],
                note=event.get("note", ""),
            )
        )
        item.status = review_status(item.reviews, self.quorum, self.max_rounds)
        item.version += 1

    def _find_item(self, item_id: str) -> TriageItem:
        campaign_id = self._item_index.get(item_id)
        if campaign_id is None:
            raise UnknownItemError(f"unknown item {item_id!r}")
        return self.campaigns[campaign_id].items[item_id]

    # -- public operations ---------------------------------------------------

    def add_campaign(self, campaign: TriageCampaign) -> TriageCampaign:
        with self._lock:
            if campaign.campaign_id in self.campaigns:
                raise ContractError(f"campaign {campaign.campaign_id!r} already exists")
            event = {
                "event": "campaign_created",
                "campaign": {
                    **campaign.as_dict(),
                    "items": [i.as_dict() for i in campaign.items_sorted()],
                },
            }
            self._apply(event)
            self._append(event)
            return self.campaigns[campaign.campaign_id]

    def get_campaign(self, campaign_id: str) -> TriageCampaign:
        campaign = self.campaigns.get(campaign_id)
        if campaign is None:
            raise UnknownItemError(f"unknown campaign {campaign_id!r}")
        return campaign

    def get_item(self, item_id: str) -> TriageItem:
        return self._find_item(item_id)

    def submit_review(
        self,
        item_id: str,
        reviewer_id: str,
        verdict: str,
        round: int,
        note: str = "",
        expected_version: int | None = None,
    ) -> TriageItem:
        """Validate, append to the log, and recompute the item status."""
        with self._lock:
            item = self._find_item(item_id)
            if expected_version is not None and expected_version != item.version:
                raise VersionConflictError(
                    f"item {item_id} is at version {item.version}, caller sent "
                    f"{expected_version}"
                )
            if round > self.max_rounds:
                raise ContractError(
                    f"round {round} exceeds the configured maximum of {self.max_rounds}"
                )
            review = Review(reviewer_id=reviewer_id, verdict=verdict, round=round, note=note)
            if any(
                r.reviewer_id == reviewer_id and r.round == round for r in item.reviews
            ):
                raise DuplicateVoteError(
                    f"{reviewer_id} already voted on {item_id} in round {round}"
                )
            event = {
                "event": "review_submitted",
                "item_id": item_id,
                "reviewer_id": review.reviewer_id,
                "verdict": review.verdict,
                "round": review.round,
                "note": review.note,
                "ts": dt.datetime.now(dt.timezone.utc).isoformat(),
            }
            self._apply(event)
            self._append(event)
            return item
