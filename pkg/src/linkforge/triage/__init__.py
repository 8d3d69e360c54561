"""Human triage loop for predicted-but-unlinked attack->CVE candidates."""

from linkforge.triage.models import Review, TriageCampaign, TriageItem, review_status
from linkforge.triage.service import TriageService, build_campaign, export_curated

__all__ = [
    "Review",
    "TriageCampaign",
    "TriageItem",
    "review_status",
    "TriageService",
    "build_campaign",
    "export_curated",
]
