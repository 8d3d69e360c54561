"""Triage domain objects and the reviewer-agreement rule.

An item is accepted when a quorum of distinct reviewers (default 2) votes
``link`` within the same round, rejected when a quorum votes ``no_link``
within the same round. Mixed verdicts leave the item contested pending a
later round (default max 2 rounds); items still contested after the last
round stay contested and count in neither accepted nor rejected. Status is a
pure function of the review multiset, so replaying the audit log always
reproduces it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from linkforge.errors import ContractError

VERDICTS = ("link", "no_link")
STATUSES = ("pending", "accepted", "rejected", "contested")

DEFAULT_QUORUM = 2
DEFAULT_MAX_ROUNDS = 2


@dataclass(frozen=True)
class Review:
    reviewer_id: str
    verdict: str
    round: int
    note: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ContractError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        if self.round < 1:
            raise ContractError("review rounds are numbered from 1")


def review_status(
    reviews: list[Review],
    quorum: int = DEFAULT_QUORUM,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> str:
    """Fold a review multiset into an item status."""
    by_round: dict[int, list[Review]] = {}
    for review in reviews:
        by_round.setdefault(review.round, []).append(review)

    mixed_round_seen = False
    for round_no in sorted(by_round):
        round_reviews = by_round[round_no]
        link_voters = {r.reviewer_id for r in round_reviews if r.verdict == "link"}
        no_link_voters = {r.reviewer_id for r in round_reviews if r.verdict == "no_link"}
        if len(link_voters) >= quorum and len(no_link_voters) >= quorum:
            # Both sides reached quorum: no agreement this round.
            mixed_round_seen = True
            continue
        if len(link_voters) >= quorum:
            return "accepted"
        if len(no_link_voters) >= quorum:
            return "rejected"
        if link_voters and no_link_voters:
            mixed_round_seen = True

    if mixed_round_seen:
        return "contested"
    return "pending"


@dataclass
class TriageItem:
    item_id: str
    attack_id: str
    cve_id: str
    score_pct: float
    status: str = "pending"
    reviews: list[Review] = field(default_factory=list)
    version: int = 0

    def as_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "attack_id": self.attack_id,
            "cve_id": self.cve_id,
            "score_pct": self.score_pct,
            "status": self.status,
            "version": self.version,
            "reviews": [
                {
                    "reviewer_id": r.reviewer_id,
                    "verdict": r.verdict,
                    "round": r.round,
                    "note": r.note,
                }
                for r in self.reviews
            ],
        }


@dataclass
class TriageCampaign:
    campaign_id: str
    snapshot_label: str
    backend_id: str
    threshold_pct: float
    items: dict[str, TriageItem]
    created_at: str
    gt_link_count: int = 0

    def items_sorted(self) -> list[TriageItem]:
        return sorted(
            self.items.values(), key=lambda i: (-i.score_pct, i.attack_id, i.cve_id)
        )

    def status_counts(self) -> dict[str, int]:
        counts = {status: 0 for status in STATUSES}
        for item in self.items.values():
            counts[item.status] += 1
        return counts

    def as_dict(self, with_items: bool = False) -> dict:
        record = {
            "campaign_id": self.campaign_id,
            "snapshot_label": self.snapshot_label,
            "backend_id": self.backend_id,
            "threshold_pct": self.threshold_pct,
            "created_at": self.created_at,
            "gt_link_count": self.gt_link_count,
            "item_count": len(self.items),
            "status_counts": self.status_counts(),
        }
        if with_items:
            record["items"] = [i.as_dict() for i in self.items_sorted()]
        return record
