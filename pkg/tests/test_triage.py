"""Triage state machine, event-log replay, campaign building, and export."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkforge.corpus.models import AttackKind
from linkforge.errors import ContractError
from linkforge.links import GroundTruthMap
from linkforge.similarity import PredictionResult
from linkforge.triage.models import Review, review_status
from linkforge.triage.service import (
    DuplicateVoteError,
    TriageService,
    UnknownItemError,
    VersionConflictError,
    build_campaign,
    export_curated,
    read_events,
)


def gt_map(entries, label="snap-1"):
    return GroundTruthMap(
        kind=AttackKind.TECHNIQUE,
        entries=dict(entries),
        chains={k: [] for k in entries},
        snapshot_label=label,
    )


def prediction(attack_id, scored):
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
    return PredictionResult(
        attack_id=attack_id,
        threshold_pct=58.0,
        ranked=ranked,
        predicted=frozenset(scored),
    )


class TestAgreementRule:
    def test_two_link_votes_accept(self):
        reviews = [Review("r1", "link", 1), Review("r2", "link", 1)]
        assert review_status(reviews) == "accepted"

    def test_two_no_link_votes_reject(self):
        reviews = [Review("r1", "no_link", 1), Review("r2", "no_link", 1)]
        assert review_status(reviews) == "rejected"

    def test_single_vote_never_final(self):
        assert review_status([Review("r1", "link", 1)]) == "pending"
        assert review_status([Review("r1", "no_link", 2)]) == "pending"

    def test_mixed_round_then_agreement(self):
        reviews = [
            Review("r1", "link", 1),
            Review("r2", "no_link", 1),
            Review("r1", "no_link", 2),
            Review("r2", "no_link", 2),
        ]
        assert review_status(reviews) == "rejected"

    def test_mixed_round_without_agreement_contested(self):
        reviews = [Review("r1", "link", 1), Review("r2", "no_link", 1)]
        assert review_status(reviews) == "contested"

    def test_same_reviewer_cannot_make_quorum(self):
        reviews = [Review("r1", "link", 1), Review("r1", "link", 1)]
        assert review_status(reviews) == "pending"

    def test_both_sides_quorum_is_contested(self):
        reviews = [
            Review("r1", "link", 1),
            Review("r2", "link", 1),
            Review("r3", "no_link", 1),
            Review("r4", "no_link", 1),
        ]
        assert review_status(reviews) == "contested"

    def test_quorum_with_extra_dissent_still_accepts(self):
        reviews = [
            Review("r1", "link", 1),
            Review("r2", "link", 1),
            Review("r3", "no_link", 1),
        ]
        assert review_status(reviews) == "accepted"

    def test_no_reviews_pending(self):
        assert review_status([]) == "pending"

    @given(
        st.lists(
            st.tuples(
                st.sampled_from(["r1", "r2", "r3"]),
                st.sampled_from(["link", "no_link"]),
                st.integers(1, 2),
            ),
            max_size=8,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_status_deterministic_and_valid(self, raw):
        seen = set()
        reviews = []
        for reviewer, verdict, round_no in raw:
            if (reviewer, round_no) in seen:
                continue
            seen.add((reviewer, round_no))
            reviews.append(Review(reviewer, verdict, round_no))
        status = review_status(reviews)
        assert status in ("pending", "accepted", "rejected", "contested")
        assert review_status(list(reviews)) == status  # pure function


class TestBuildCampaign:
    def test_one_item_per_predicted_unlinked_pair(self):
        gt = gt_map({"T1000": frozenset({"CVE-2020-0001"})})
        preds = [prediction("T1000", {"CVE-2020-0001": 0.9, "CVE-2020-0002": 0.8})]
        campaign = build_campaign("c1", preds, gt, "snap-1", "backend-x", 58.0)
        items = list(campaign.items.values())
        assert len(items) == 1
        assert (items[0].attack_id, items[0].cve_id) == ("T1000", "CVE-2020-0002")

    def test_prediction_subset_of_gt_yields_empty_campaign(self):
        gt = gt_map({"T1000": frozenset({"CVE-2020-0001", "CVE-2020-0002"})})
        preds = [prediction("T1000", {"CVE-2020-0001": 0.9})]
        campaign = build_campaign("c1", preds, gt, "snap-1", "backend-x", 58.0)
        assert campaign.items == {}

    def test_items_sorted_by_descending_score(self):
        gt = gt_map({"T1000": frozenset(), "T2000": frozenset()})
        preds = [
            prediction("T1000", {"CVE-2020-0001": 0.7}),
            prediction("T2000", {"CVE-2020-0002": 0.95}),
        ]
        campaign = build_campaign("c1", preds, gt, "snap-1", "backend-x", 58.0)
        ordered = campaign.items_sorted()
        assert [i.cve_id for i in ordered] == ["CVE-2020-0002", "CVE-2020-0001"]

    def test_no_item_references_ground_truth_pair(self):
        gt = gt_map({"T1000": frozenset({"CVE-2020-0001"})})
        preds = [prediction("T1000", {"CVE-2020-0001": 0.99, "CVE-2020-0002": 0.8})]
        campaign = build_campaign("c1", preds, gt, "snap-1", "backend-x", 58.0)
        for item in campaign.items.values():
            assert item.cve_id not in gt.entries[item.attack_id]

    def test_snapshot_label_mismatch_rejected(self):
        gt = gt_map({"T1000": frozenset()}, label="snap-OLD")
        with pytest.raises(ContractError):
            build_campaign("c1", [], gt, "snap-NEW", "backend-x", 58.0)

    def test_validation_scale_campaign(self):
        # 74 techniques producing 434 predicted-but-unlinked pairs.
        sizes = [6] * 64 + [5] * 10
        assert sum(sizes) == 434
        entries = {}
        preds = []
        counter = itertools.count()
        for i, size in enumerate(sizes):
            attack_id = f"T{8000 + i}"
            entries[attack_id] = frozenset()
            scored = {f"CVE-2021-{30000 + next(counter)}": 0.9 - i * 1e-4 for _ in range(size)}
            preds.append(prediction(attack_id, scored))
        campaign = build_campaign("candidates", preds, gt_map(entries), "snap-1", "b", 58.0)
        assert len(campaign.items) == 434
        assert len({i.attack_id for i in campaign.items.values()}) == 74


class TestServiceAndReplay:
    def make_campaign(self, n_items=4):
        gt = gt_map({f"T{1000 + i}": frozenset() for i in range(n_items)})
        preds = [
            prediction(f"T{1000 + i}", {f"CVE-2020-{2000 + i}": 0.9 - i * 0.01})
            for i in range(n_items)
        ]
        return build_campaign("c1", preds, gt, "snap-1", "backend-x", 58.0)

    def test_submit_review_recomputes_status(self, tmp_path):
        service = TriageService(tmp_path / "events.log")
        campaign = service.add_campaign(self.make_campaign())
        item_id = campaign.items_sorted()[0].item_id
        service.submit_review(item_id, "r1", "link", 1)
        assert service.get_item(item_id).status == "pending"
        service.submit_review(item_id, "r2", "link", 1)
        assert service.get_item(item_id).status == "accepted"
        assert service.get_item(item_id).version == 2

    def test_duplicate_vote_rejected(self, tmp_path):
        service = TriageService(tmp_path / "events.log")
        campaign = service.add_campaign(self.make_campaign())
        item_id = campaign.items_sorted()[0].item_id
        service.submit_review(item_id, "r1", "link", 1)
        with pytest.raises(DuplicateVoteError):
            service.submit_review(item_id, "r1", "no_link", 1)

    def test_version_conflict(self, tmp_path):
        service = TriageService(tmp_path / "events.log")
        campaign = service.add_campaign(self.make_campaign())
        item_id = campaign.items_sorted()[0].item_id
        service.submit_review(item_id, "r1", "link", 1, expected_version=0)
        with pytest.raises(VersionConflictError):
            service.submit_review(item_id, "r2", "link", 1, expected_version=0)

    def test_round_beyond_max_rejected(self, tmp_path):
        service = TriageService(tmp_path / "events.log", max_rounds=2)
        campaign = service.add_campaign(self.make_campaign())
        item_id = campaign.items_sorted()[0].item_id
        with pytest.raises(ContractError):
            service.submit_review(item_id, "r1", "link", 3)

    def test_unknown_item(self, tmp_path):
        service = TriageService(tmp_path / "events.log")
        with pytest.raises(UnknownItemError):
            service.submit_review("nope", "r1", "link", 1)

    def test_replay_reproduces_state(self, tmp_path):
        log = tmp_path / "events.log"
        service = TriageService(log)
        campaign = service.add_campaign(self.make_campaign())
        ids = [i.item_id for i in campaign.items_sorted()]
        service.submit_review(ids[0], "r1", "link", 1)
        service.submit_review(ids[0], "r2", "link", 1)
        service.submit_review(ids[1], "r1", "no_link", 1)
        service.submit_review(ids[1], "r2", "link", 1)
        service.submit_review(ids[2], "r1", "no_link", 1)

        replayed = TriageService(log)
        original = service.get_campaign("c1")
        restored = replayed.get_campaign("c1")
        assert {i: item.status for i, item in restored.items.items()} == {
            i: item.status for i, item in original.items.items()
        }
        assert {i: item.version for i, item in restored.items.items()} == {
            i: item.version for i, item in original.items.items()
        }
        statuses = {item.status for item in restored.items.values()}
        assert statuses == {"accepted", "contested", "pending"}

    def test_event_log_is_length_prefixed_json(self, tmp_path):
        log = tmp_path / "events.log"
        service = TriageService(log)
        campaign = service.add_campaign(self.make_campaign(1))
        service.submit_review(campaign.items_sorted()[0].item_id, "r1", "link", 1)
        events = list(read_events(log))
        assert events[0]["event"] == "campaign_created"
        assert events[1]["event"] == "review_submitted"

    def test_status_partition_invariant(self, tmp_path):
        service = TriageService(tmp_path / "events.log")
        campaign = service.add_campaign(self.make_campaign(6))
        ids = [i.item_id for i in campaign.items_sorted()]
        service.submit_review(ids[0], "r1", "link", 1)
        service.submit_review(ids[0], "r2", "link", 1)
        service.submit_review(ids[1], "r1", "no_link", 1)
        service.submit_review(ids[1], "r2", "no_link", 1)
        service.submit_review(ids[2], "r1", "link", 1)
        service.submit_review(ids[2], "r2", "no_link", 1)
        counts = service.get_campaign("c1").status_counts()
        assert sum(counts.values()) == 6
        assert counts["accepted"] == 1 and counts["rejected"] == 1
        assert counts["contested"] == 1 and counts["pending"] == 3


class TestExport:
    def build_reviewed_campaign(self, tmp_path, accepted, rejected, gt_links):
        entries = {f"T{7000 + i}": frozenset() for i in range(accepted + rejected)}
        gt = gt_map(entries)
        # Give the ground truth the requested number of total links.
        gt.entries["T7000"] = frozenset(f"CVE-1999-{100000 + i}" for i in range(gt_links))
        preds = [
            prediction(f"T{7000 + i}", {f"CVE-2021-{40000 + i}": 0.9})
            for i in range(accepted + rejected)
        ]
        campaign = build_campaign("c1", preds, gt, "snap-1", "b", 58.0)
        service = TriageService(tmp_path / "events.log")
        service.add_campaign(campaign)
        items = service.get_campaign("c1").items_sorted()
        for item in items[:accepted]:
            service.submit_review(item.item_id, "r1", "link", 1)
            service.submit_review(item.item_id, "r2", "link", 1)
        for item in items[accepted:]:
            service.submit_review(item.item_id, "r1", "no_link", 1)
            service.submit_review(item.item_id, "r2", "no_link", 1)
        return service.get_campaign("c1")

    def test_summary_counts_and_records(self, tmp_path):
        campaign = self.build_reviewed_campaign(tmp_path, accepted=3, rejected=2, gt_links=50)
        export = export_curated(campaign)
        assert export.summary["accepted"] == 3
        assert export.summary["rejected"] == 2
        assert export.summary["pending"] == 0
        assert len(export.records) == 3
        assert all(set(r) == {"attack_id", "cve_id", "score_pct", "reviewers"} for r in export.records)

    def test_zero_accepted_empty_stream(self, tmp_path):
        entries = {"T7000": frozenset()}
        preds = [prediction("T7000", {"CVE-2021-40000": 0.9})]
        campaign = build_campaign("c1", preds, gt_map(entries), "snap-1", "b", 58.0)
        export = export_curated(campaign)
        assert export.records == []
        assert export.summary["pending"] == 1
        assert export.summary["accepted"] == 0

    def test_export_idempotent(self, tmp_path):
        campaign = self.build_reviewed_campaign(tmp_path, accepted=2, rejected=1, gt_links=10)
        first = export_curated(campaign)
        second = export_curated(campaign)
        assert first.as_dict() == second.as_dict()

    def test_accepted_item_appears_in_export(self, tmp_path):
        gt = gt_map({"T1039": frozenset()})
        preds = [prediction("T1039", {"CVE-2020-3452": 0.9})]
        campaign = build_campaign("c1", preds, gt, "snap-1", "b", 58.0)
        service = TriageService(tmp_path / "events.log")
        service.add_campaign(campaign)
        item = service.get_campaign("c1").items_sorted()[0]
        service.submit_review(item.item_id, "r1", "link", 1)
        service.submit_review(item.item_id, "r2", "link", 1)
        export = export_curated(service.get_campaign("c1"))
        assert export.records[0]["attack_id"] == "T1039"
        assert export.records[0]["cve_id"] == "CVE-2020-3452"
        assert export.records[0]["reviewers"] == ["r1", "r2"]
