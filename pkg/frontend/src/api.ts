// Thin typed client over the documented triage HTTP API. The UI touches the
// server only through this module.

import type {
  Campaign,
  CampaignExport,
  PredictResponse,
  TriageItem,
  Verdict,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class TriageApi {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listCampaigns(): Promise<Campaign[]> {
    return this.request<Campaign[]>('/campaigns');
  }

  listItems(campaignId: string, status?: string): Promise<TriageItem[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : '';
    return this.request<TriageItem[]>(
      `/campaigns/${encodeURIComponent(campaignId)}/items${query}`,
    );
  }

  getItem(itemId: string): Promise<TriageItem> {
    return this.request<TriageItem>(`/items/${encodeURIComponent(itemId)}`);
  }

  submitReview(
    itemId: string,
    body: { reviewer_id: string; verdict: Verdict; round: number; note?: string; version?: number },
  ): Promise<TriageItem> {
    return this.request<TriageItem>(`/items/${encodeURIComponent(itemId)}/reviews`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  exportCampaign(campaignId: string): Promise<CampaignExport> {
    return this.request<CampaignExport>(
      `/campaigns/${encodeURIComponent(campaignId)}/export`,
    );
  }

  predict(attackText: string, thresholdPct = 58, topK = 25): Promise<PredictResponse> {
    return this.request<PredictResponse>('/predict', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ attack_text: attackText, threshold_pct: thresholdPct, top_k: topK }),
    });
  }
}
