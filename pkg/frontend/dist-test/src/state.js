// Review-flow state. The server is the single source of truth for item
// status: this layer never computes agreement locally, it only re-renders
// whatever item state the server returns (or a refetch after a conflict).
import { ApiError } from './api.js';
import { MAX_ROUNDS } from './types.js';
/** The round a new vote should target: 1 until a round ends contested. */
export function activeRound(item) {
    if (item.status !== 'contested') {
        return 1;
    }
    const highest = Math.max(0, ...item.reviews.map((r) => r.round));
    return Math.min(highest + 1, MAX_ROUNDS);
}
/** Votes are disabled once the viewer voted this round or the item is final. */
export function canVote(item, reviewerId) {
    if (item.status === 'accepted' || item.status === 'rejected') {
        return false;
    }
    const round = activeRound(item);
    return !item.reviews.some((r) => r.reviewer_id === reviewerId && r.round === round);
}
export class ReviewFlow {
    api;
    reviewerId;
    campaignId;
    events;
    items = [];
    statusFilter = null;
    constructor(api, reviewerId, campaignId, events = {}) {
        this.api = api;
        this.reviewerId = reviewerId;
        this.campaignId = campaignId;
        this.events = events;
    }
    get visibleItems() {
        if (!this.statusFilter) {
            return this.items;
        }
        return this.items.filter((i) => i.status === this.statusFilter);
    }
    async refresh() {
        this.items = await this.api.listItems(this.campaignId);
        this.events.onItemsChanged?.(this.items);
    }
    async setFilter(status) {
        this.statusFilter = status;
        this.events.onItemsChanged?.(this.items);
    }
    item(itemId) {
        return this.items.find((i) => i.item_id === itemId);
    }
    replace(item) {
        this.items = this.items.map((i) => (i.item_id === item.item_id ? item : i));
        this.events.onItemsChanged?.(this.items);
    }
    /**
     * Submit a vote with the version currently rendered. On success the
     * server's item replaces the local one; on a 409 (stale version or
     * duplicate vote) the item is refetched so the display converges to the
     * server state. Anything else surfaces an error without losing the vote
     * silently.
     */
    async vote(itemId, verdict, note = '') {
        const current = this.item(itemId);
        if (!current) {
            throw new Error(`unknown item ${itemId}`);
        }
        try {
            const updated = await this.api.submitReview(itemId, {
                reviewer_id: this.reviewerId,
                verdict,
                round: activeRound(current),
                note,
                version: current.version,
            });
            this.replace(updated);
            return 'applied';
        }
        catch (error) {
            if (error instanceof ApiError && error.isConflict) {
                const fresh = await this.api.getItem(itemId);
                this.replace(fresh);
                return 'conflict-refreshed';
            }
            this.events.onError?.(error instanceof Error ? error.message : String(error));
            throw error;
        }
    }
    whatIf(attackText, thresholdPct = 58) {
        return this.api.predict(attackText, thresholdPct);
    }
}
