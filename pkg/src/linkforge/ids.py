"""ID grammars for the four repositories plus synthesized procedure IDs."""

import re

TECHNIQUE_RE = re.compile(r"^T\d{4}(\.\d{3})?$")
TACTIC_RE = re.compile(r"^TA\d{4}$")
CAPEC_RE = re.compile(r"^CAPEC-\d+$")
CWE_RE = re.compile(r"^CWE-\d+$")
CVE_RE = re.compile(r"^CVE-\d{4}-\d{4,}$")
PROCEDURE_RE = re.compile(r"^PROC-T\d{4}(\.\d{3})?-\d+$")

CVE_ANYWHERE_RE = re.compile(r"CVE-\d{4}-\d{4,}")


def is_technique_id(value: str) -> bool:
    return bool(TECHNIQUE_RE.match(value))


def is_subtechnique_id(value: str) -> bool:
    return bool(TECHNIQUE_RE.match(value)) and "." in value


def is_tactic_id(value: str) -> bool:
    return bool(TACTIC_RE.match(value))


def is_capec_id(value: str) -> bool:
    return bool(CAPEC_RE.match(value))


def is_cwe_id(value: str) -> bool:
    return bool(CWE_RE.match(value))


def is_cve_id(value: str) -> bool:
    return bool(CVE_RE.match(value))


def is_procedure_id(value: str) -> bool:
    return bool(PROCEDURE_RE.match(value))


def cve_year(cve_id: str) -> int:
    """Publication year encoded in a CVE ID."""
    if not is_cve_id(cve_id):
        raise ValueError(f"not a CVE id: {cve_id!r}")
    return int(cve_id.split("-")[1])
