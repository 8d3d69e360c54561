// Thin typed client over the documented triage HTTP API. The UI touches the
// server only through this module.
export class ApiError extends Error {
    status;
    detail;
    constructor(status, detail) {
        super(`HTTP ${status}: ${detail}`);
        this.status = status;
        this.detail = detail;
    }
    get isConflict() {
        return this.status === 409;
    }
}
export class TriageApi {
    baseUrl;
    fetchImpl;
    constructor(baseUrl = '', fetchImpl = (url, init) => fetch(url, init)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async request(path, init) {
        const response = await this.fetchImpl(this.baseUrl + path, init);
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const body = await response.json();
                detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
            }
            catch {
                // keep the status text
            }
            throw new ApiError(response.status, detail);
        }
        return (await response.json());
    }
    listCampaigns() {
        return this.request('/campaigns');
    }
    listItems(campaignId, status) {
        const query = status ? `?status=${encodeURIComponent(status)}` : '';
        return this.request(`/campaigns/${encodeURIComponent(campaignId)}/items${query}`);
    }
    getItem(itemId) {
        return this.request(`/items/${encodeURIComponent(itemId)}`);
    }
    submitReview(itemId, body) {
        return this.request(`/items/${encodeURIComponent(itemId)}/reviews`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(body),
        });
    }
    exportCampaign(campaignId) {
        return this.request(`/campaigns/${encodeURIComponent(campaignId)}/export`);
    }
    predict(attackText, thresholdPct = 58, topK = 25) {
        return this.request('/predict', {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ attack_text: attackText, threshold_pct: thresholdPct, top_k: topK }),
        });
    }
}
