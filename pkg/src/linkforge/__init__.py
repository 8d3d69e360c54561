"""linkforge: link textual attack descriptions to CVE vulnerability reports.

The pipeline: ingest the MITRE-family repositories into a canonical snapshot,
derive ground-truth attack->CVE links from explicit cross-references, embed
texts, rank CVEs by cosine similarity, evaluate the predictions, and triage
predicted-but-unlinked candidates with human reviewers.
"""

__version__ = "0.1.0"
