"""Corpus ingestion: parse the source repositories into normalized records."""

from linkforge.corpus.models import (
    AttackEntry,
    AttackKind,
    AttackSource,
    CorpusSnapshot,
    DanglingReference,
    SkipReport,
    VulnerabilityEntry,
    WeaknessEntry,
)
from linkforge.corpus.attack_stix import parse_attack_bundle
from linkforge.corpus.capec_xml import parse_capec_catalog
from linkforge.corpus.cwe_xml import parse_cwe_catalog
from linkforge.corpus.cve_feed import parse_cve_feed
from linkforge.corpus.canonical import dump_canonical, load_canonical

__all__ = [
    "AttackEntry",
    "AttackKind",
    "AttackSource",
    "CorpusSnapshot",
    "DanglingReference",
    "SkipReport",
    "VulnerabilityEntry",
    "WeaknessEntry",
    "parse_attack_bundle",
    "parse_capec_catalog",
    "parse_cwe_catalog",
    "parse_cve_feed",
    "dump_canonical",
    "load_canonical",
]
