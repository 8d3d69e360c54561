// DTOs mirroring the triage API wire format (see docs/formats.md).

export type Verdict = 'link' | 'no_link';
export type ItemStatus = 'pending' | 'accepted' | 'rejected' | 'contested';

export interface Review {
  reviewer_id: string;
  verdict: Verdict;
  round: number;
  note: string;
}

export interface TriageItem {
  item_id: string;
  attack_id: string;
  cve_id: string;
  score_pct: number;
  status: ItemStatus;
  version: number;
  reviews: Review[];
}

export interface Campaign {
  campaign_id: string;
  snapshot_label: string;
  backend_id: string;
  threshold_pct: number;
  created_at: string;
  item_count: number;
  status_counts: Record<ItemStatus, number>;
}

export interface CampaignExport {
  records: Array<{
    attack_id: string;
    cve_id: string;
    score_pct: number;
    reviewers: string[];
  }>;
  summary: Record<string, unknown>;
}

export interface Prediction {
  cve_id: string;
  score_pct: number;
  predicted: boolean;
}

export interface PredictResponse {
  threshold_pct: number;
  backend_id: string;
  predictions: Prediction[];
}

export const MAX_ROUNDS = 2;
