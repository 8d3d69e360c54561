"""Cosine contract, rank/cut semantics, and brute-force scan equivalence."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkforge.embedding.backend import EmbeddingVector, deterministic_embed
from linkforge.errors import ContractError
from linkforge.similarity import (
    batch_predict,
    cosine,
    dump_predictions,
    load_predictions,
    percent_score,
    rank_and_cut,
)
from linkforge.textprep import clean


def vec(*values: float, normalized: bool = False) -> EmbeddingVector:
    return EmbeddingVector(dims=len(values), values=np.array(values), normalized=normalized)


def unit(*values: float) -> EmbeddingVector:
    arr = np.array(values, dtype=float)
    return EmbeddingVector(dims=len(values), values=arr / np.linalg.norm(arr), normalized=True)


def reference_scan(attacks, cve_vectors, threshold_pct):
    """Independent O(|A|*|C|) scan: same primitive, separately written logic."""
    out = []
    for attack_id, attack_vec in attacks:
        scored = []
        for cve_id in cve_vectors:
            q = cve_vectors[cve_id]
            raw = float(np.dot(attack_vec.values, q.values)) / (
                float(np.linalg.norm(attack_vec.values)) * float(np.linalg.norm(q.values))
            )
            scored.append((cve_id, max(-1.0, min(1.0, raw))))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        predicted = frozenset(
            c for c, s in scored if 100.0 * max(s, 0.0) > threshold_pct
        )
        out.append((attack_id, scored, predicted))
    return out


class TestCosine:
    def test_identical_unit_vectors(self):
        assert cosine(unit(1, 1, 0), unit(1, 1, 0)) == 1.0

    def test_orthogonal_basis(self):
        assert cosine(vec(1, 0), vec(0, 1)) == 0.0

    def test_hand_computed_value(self):
        value = cosine(unit(1, 1, 0), vec(1, 0, 0))
        assert value == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_dims_mismatch(self):
        with pytest.raises(ContractError):
            cosine(vec(1, 0), vec(1, 0, 0))

    def test_zero_vector_rejected(self):
        with pytest.raises(ContractError):
            cosine(vec(0, 0), vec(1, 0))

    @given(
        st.lists(st.floats(-5, 5, allow_subnormal=False), min_size=4, max_size=4),
        st.lists(st.floats(-5, 5, allow_subnormal=False), min_size=4, max_size=4),
    )
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_range(self, a, b):
        if np.linalg.norm(a) < 1e-9 or np.linalg.norm(b) < 1e-9:
            return
        p, q = vec(*a), vec(*b)
        assert cosine(p, q) == pytest.approx(cosine(q, p), abs=1e-12)
        assert -1.0 <= cosine(p, q) <= 1.0

    def test_rank_invariant_under_positive_scaling(self):
        rng = np.random.default_rng(5)
        attack = vec(*rng.normal(size=8))
        cves = {f"CVE-2020-{1000+i}": vec(*rng.normal(size=8)) for i in range(20)}
        base = rank_and_cut("a", attack, cves, 50.0)
        scaled = {
            cve_id: EmbeddingVector(dims=8, values=v.values * 17.5)
            for cve_id, v in cves.items()
        }
        scaled_result = rank_and_cut(
            "a", EmbeddingVector(dims=8, values=attack.values * 3.0), scaled, 50.0
        )
        assert [c for c, _ in base.ranked] == [c for c, _ in scaled_result.ranked]


class TestRankAndCut:
    def test_strict_threshold_boundary(self):
        # The attack vector (0.5, 0.5, 0.5, 0.5) is exactly unit in floats, so
        # the cosine against e1 is exactly 0.5 and its percent score exactly
        # 50.0: a score equal to the threshold must be excluded.
        attack = vec(0.5, 0.5, 0.5, 0.5)
        cves = {
            "CVE-2020-0001": vec(0.5, 0.5, 0.5, 0.5),  # cosine 1.0  -> 100
            "CVE-2020-0002": vec(1.0, 0.0, 0.0, 0.0),  # cosine 0.5  -> 50 exactly
            "CVE-2020-0003": vec(-1.0, 0.0, 0.0, 0.0),  # cosine -0.5 -> 0 (clamped)
        }
        result = rank_and_cut("a", attack, cves, 50.0)
        assert result.score_of("CVE-2020-0002") == 0.5
        assert result.predicted == {"CVE-2020-0001"}  # 50.0 is excluded: strict >
        assert [c for c, _ in result.ranked] == [
            "CVE-2020-0001",
            "CVE-2020-0002",
            "CVE-2020-0003",
        ]
        barely_lower = rank_and_cut("a", attack, cves, 49.999)
        assert barely_lower.predicted == {"CVE-2020-0001", "CVE-2020-0002"}

    def test_threshold_zero_predicts_all_positive(self):
        cves = {"CVE-2020-0001": unit(1, 0), "CVE-2020-0002": unit(1, 1)}
        result = rank_and_cut("a", unit(1, 0.2), cves, 0.0)
        assert result.predicted == set(cves)

    def test_threshold_100_predicts_nothing(self):
        cves = {"CVE-2020-0001": unit(1, 0)}
        result = rank_and_cut("a", unit(1, 0), cves, 100.0)
        assert result.predicted == frozenset()

    def test_empty_corpus_flagged(self):
        result = rank_and_cut("a", unit(1, 0), {}, 50.0)
        assert result.empty_corpus
        assert result.ranked == []

    def test_ties_break_by_ascending_cve_id(self):
        same = unit(1, 0)
        cves = {"CVE-2020-0002": same, "CVE-2020-0001": same, "CVE-2020-0003": same}
        result = rank_and_cut("a", unit(1, 0), cves, 10.0)
        assert [c for c, _ in result.ranked] == [
            "CVE-2020-0001",
            "CVE-2020-0002",
            "CVE-2020-0003",
        ]

    def test_oracle_backend_predicted_superset_of_linked(self):
        linked_text = clean("tokenx")
        attack_vec = deterministic_embed(linked_text, 512)
        cves = {
            f"CVE-2020-{1000+i}": deterministic_embed(linked_text, 512) for i in range(4)
        }
        cves["CVE-2020-9999"] = deterministic_embed(clean("unrelated"), 512)
        for threshold in (0.0, 25.0, 58.0, 99.9):
            result = rank_and_cut("a", attack_vec, cves, threshold)
            assert {f"CVE-2020-{1000+i}" for i in range(4)} <= result.predicted

    def test_threshold_out_of_range(self):
        with pytest.raises(ContractError):
            rank_and_cut("a", unit(1, 0), {"CVE-2020-0001": unit(1, 0)}, 101.0)

    def test_monotone_shrinkage_in_threshold(self):
        rng = np.random.default_rng(11)
        attack = vec(*rng.normal(size=16))
        cves = {f"CVE-2021-{1000+i}": vec(*rng.normal(size=16)) for i in range(50)}
        previous = None
        for threshold in range(0, 101):
            predicted = rank_and_cut("a", attack, cves, float(threshold)).predicted
            if previous is not None:
                assert predicted <= previous
            previous = predicted


class TestBatchPredict:
    def test_batch_preserves_input_order(self):
        cves = {"CVE-2020-0001": unit(1, 0)}
        attacks = [("a2", unit(1, 0)), ("a1", unit(0, 1))]
        items = batch_predict(attacks, cves, 50.0)
        assert [i.attack_id for i in items] == ["a2", "a1"]

    def test_batch_equals_sequential_map(self):
        rng = np.random.default_rng(3)
        cves = {f"CVE-2022-{1000+i}": vec(*rng.normal(size=8)) for i in range(30)}
        attacks = [(f"T{1000+i}", vec(*rng.normal(size=8))) for i in range(10)]
        items = batch_predict(attacks, cves, 40.0)
        for (attack_id, attack_vec), item in zip(attacks, items):
            solo = rank_and_cut(attack_id, attack_vec, cves, 40.0)
            assert item.result.ranked == solo.ranked
            assert item.result.predicted == solo.predicted

    def test_per_item_error_slot(self):
        cves = {"CVE-2020-0001": unit(1, 0)}
        bad = EmbeddingVector(dims=3, values=np.array([1.0, 0, 0]))
        items = batch_predict([("good", unit(1, 0)), ("bad", bad)], cves, 50.0)
        assert items[0].result is not None and items[0].error is None
        assert items[1].result is None and "dims" in items[1].error

    def test_equals_brute_force_scan_bit_for_bit(self):
        rng = np.random.default_rng(17)
        dims = 64
        cves = {f"CVE-2023-{1000+i}": vec(*rng.normal(size=dims)) for i in range(200)}
        attacks = [(f"T{2000+i}", vec(*rng.normal(size=dims))) for i in range(20)]
        items = batch_predict(attacks, cves, 58.0)
        expected = reference_scan(attacks, cves, 58.0)
        for item, (attack_id, scored, predicted) in zip(items, expected):
            assert item.attack_id == attack_id
            assert item.result.ranked == scored  # exact float equality
            assert item.result.predicted == predicted


def test_large_batch_exact_scan_matches_reference_sample():
    # 100 attacks over 10k CVEs completes as an exact scan; a sample of
    # attacks is checked against the brute-force reference in full.
    rng = np.random.default_rng(1)
    dims = 64

    def u(values):
        return EmbeddingVector(dims=dims, values=values / np.linalg.norm(values),
                               normalized=True)

    cves = {f"CVE-2020-{10000 + i}": u(rng.normal(size=dims)) for i in range(10_000)}
    attacks = [(f"T{1000 + i}", u(rng.normal(size=dims))) for i in range(100)]
    items = batch_predict(attacks, cves, 58.0)
    assert len(items) == 100
    assert all(item.error is None for item in items)
    assert all(len(item.result.ranked) == 10_000 for item in items)
    sample = [attacks[i] for i in (0, 37, 99)]
    expected = reference_scan(sample, cves, 58.0)
    by_id = {item.attack_id: item for item in items}
    for attack_id, scored, predicted in expected:
        assert by_id[attack_id].result.ranked == scored
        assert by_id[attack_id].result.predicted == predicted


def test_predictions_jsonl_round_trip():
    rng = np.random.default_rng(23)
    cves = {f"CVE-2020-{1000+i}": vec(*rng.normal(size=8)) for i in range(10)}
    attacks = [(f"T{3000+i}", vec(*rng.normal(size=8))) for i in range(3)]
    results = [i.result for i in batch_predict(attacks, cves, 58.0)]
    buffer = io.StringIO()
    dump_predictions(results, buffer)
    loaded, table = load_predictions(io.StringIO(buffer.getvalue()))
    assert [r.attack_id for r in loaded] == [r.attack_id for r in results]
    for original, parsed in zip(results, loaded):
        assert parsed.predicted == original.predicted
        assert parsed.ranked == original.ranked
    assert table.threshold_pct == 58.0


def test_top_k_truncation():
    rng = np.random.default_rng(29)
    cves = {f"CVE-2020-{1000+i}": vec(*rng.normal(size=8)) for i in range(10)}
    results = [batch_predict([("a", vec(*rng.normal(size=8)))], cves, 58.0)[0].result]
    buffer = io.StringIO()
    dump_predictions(results, buffer, top_k=3)
    loaded, _ = load_predictions(io.StringIO(buffer.getvalue()))
    assert len(loaded[0].ranked) == 3


def test_percent_score_clamps_negative():
    assert percent_score(-0.4) == 0.0
    assert percent_score(0.58) == pytest.approx(58.0)
