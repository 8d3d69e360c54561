"""Shared fixtures: the bundled Table-7 corpus and the one-hot oracle corpus."""

from __future__ import annotations

from pathlib import Path

import pytest

from linkforge.corpus import (
    parse_attack_bundle,
    parse_capec_catalog,
    parse_cve_feed,
    parse_cwe_catalog,
)
from linkforge.corpus.models import (
    AttackEntry,
    AttackKind,
    AttackSource,
    CorpusSnapshot,
    VulnerabilityEntry,
    WeaknessEntry,
)

FIXTURES = Path(__file__).parent / "fixtures"

ORACLE_ATTACKS = 20
ORACLE_CVES_PER_ATTACK = 10
ORACLE_DIMS = 4096
ORACLE_SEED = 0


@pytest.fixture(scope="session")
def fixture_paths() -> dict[str, Path]:
    return {
        "attack": FIXTURES / "attack_bundle.json",
        "capec": FIXTURES / "capec_catalog.xml",
        "cwe": FIXTURES / "cwe_catalog.xml",
        "cve": FIXTURES / "cve_feed.json",
    }


@pytest.fixture(scope="session")
def fixture_snapshot(fixture_paths) -> CorpusSnapshot:
    attacks, _ = parse_attack_bundle(fixture_paths["attack"].read_bytes())
    patterns, _ = parse_capec_catalog(fixture_paths["capec"].read_bytes())
    weaknesses, _ = parse_cwe_catalog(fixture_paths["cwe"].read_bytes())
    vulnerabilities, _ = parse_cve_feed(fixture_paths["cve"].read_bytes())
    return CorpusSnapshot(
        attacks=tuple(attacks) + tuple(patterns),
        weaknesses=tuple(weaknesses),
        vulnerabilities=tuple(vulnerabilities),
        snapshot_label="fixture-v1",
    )


def oracle_token(index: int) -> str:
    return f"linktok{index:02d}"


def build_oracle_snapshot() -> CorpusSnapshot:
    """20 techniques, 200 CVEs; linked pairs share a unique token.

    Technique i's description is the single token ``linktok<i>``; each of its
    10 linked CVEs carries the same token, so the deterministic embedder maps
    linked pairs to identical vectors and unlinked pairs to orthogonal ones.
    """
    attacks: list[AttackEntry] = []
    weaknesses: list[WeaknessEntry] = []
    vulnerabilities: list[VulnerabilityEntry] = []
    for i in range(ORACLE_ATTACKS):
        technique_id = f"T{9000 + i}"
        token = oracle_token(i)
        cve_ids = tuple(
            f"CVE-2020-{10000 + i * ORACLE_CVES_PER_ATTACK + j}"
            for j in range(ORACLE_CVES_PER_ATTACK)
        )
        attacks.append(
            AttackEntry(id=technique_id, kind=AttackKind.TECHNIQUE, name="",
                        description=token)
        )
        attacks.append(
            AttackEntry(
                id=f"CAPEC-{900 + i}",
                kind=AttackKind.PATTERN,
                name="",
                description=f"pattern mentioning {token}",
                technique_refs=(technique_id,),
                source=AttackSource.CAPEC,
            )
        )
        weaknesses.append(
            WeaknessEntry(
                id=f"CWE-{9000 + i}",
                name="",
                description=f"weakness behind {token}",
                observed_cves=cve_ids,
                related_pattern_ids=(f"CAPEC-{900 + i}",),
            )
        )
        vulnerabilities.extend(
            VulnerabilityEntry(id=cve_id, description=token) for cve_id in cve_ids
        )
    return CorpusSnapshot(
        attacks=tuple(attacks),
        weaknesses=tuple(weaknesses),
        vulnerabilities=tuple(vulnerabilities),
        snapshot_label="oracle-fixture",
    )


@pytest.fixture(scope="session")
def oracle_snapshot() -> CorpusSnapshot:
    return build_oracle_snapshot()
