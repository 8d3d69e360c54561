"""Text cleaning applied to attack and CVE descriptions before embedding.

Lowercases, strips citation markers and URLs, and replaces characters outside
the allow-list with spaces. Deliberately does NOT stem, lemmatize, or remove
stop words: transformer backends want grammatical structure intact.

Allow-list (documented in docs/formats.md): lowercase letters, digits,
whitespace, and ``. , - : /`` which carry signal in CVE ids, version strings
and paths.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

CITATION_RE = re.compile(r"\(citation:[^)]*\)", re.IGNORECASE)
BRACKET_REF_RE = re.compile(r"\[\d+\]")
URL_RE = re.compile(r"\b(?:https?://|www\.)\S+", re.IGNORECASE)
DISALLOWED_RE = re.compile(r"[^a-z0-9\s.,\-:/]")
WHITESPACE_RE = re.compile(r"\s+")

_MAX_PASSES = 10


@dataclass(frozen=True)
class CleanText:
    source_id: str
    text: str
    token_estimate: int

    @property
    def empty(self) -> bool:
        return not self.text


def _clean_pass(text: str) -> str:
    text = CITATION_RE.sub(" ", text)
    text = BRACKET_REF_RE.sub(" ", text)
    text = URL_RE.sub(" ", text)
    text = text.lower()
    text = DISALLOWED_RE.sub(" ", text)
    return WHITESPACE_RE.sub(" ", text).strip()


def clean(raw: str, source_id: str = "") -> CleanText:
    """Clean one text. Idempotent: cleaning runs to a fixpoint.

    A single pass can expose a previously hidden URL (a disallowed character
    glued to a scheme becomes a space), so passes repeat until stable.
    """
    text = raw
    for _ in range(_MAX_PASSES):
        cleaned = _clean_pass(text)
        if cleaned == text:
            break
        text = cleaned
    tokens = text.split()
    return CleanText(source_id=source_id, text=text, token_estimate=len(tokens))
