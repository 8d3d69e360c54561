// Review-flow state. The server is the single source of truth for item
// status: this layer never computes agreement locally, it only re-renders
// whatever item state the server returns (or a refetch after a conflict).

import { ApiError, TriageApi } from './api.js';
import type { PredictResponse, TriageItem, Verdict } from './types.js';
import { MAX_ROUNDS } from './types.js';

export type VoteOutcome = 'applied' | 'conflict-refreshed';

export interface FlowEvents {
  onItemsChanged?: (items: TriageItem[]) => void;
  onError?: (message: string) => void;
}

/** The round a new vote should target: 1 until a round ends contested. */
export function activeRound(item: TriageItem): number {
  if (item.status !== 'contested') {
    return 1;
  }
  const highest = Math.max(0, ...item.reviews.map((r) => r.round));
  return Math.min(highest + 1, MAX_ROUNDS);
}

/** Votes are disabled once the viewer voted this round or the item is final. */
export function canVote(item: TriageItem, reviewerId: string): boolean {
  if (item.status === 'accepted' || item.status === 'rejected') {
    return false;
  }
  const round = activeRound(item);
  return !item.reviews.some((r) => r.reviewer_id === reviewerId && r.round === round);
}

export class ReviewFlow {
  items: TriageItem[] = [];
  statusFilter: string | null = null;

  constructor(
    private readonly api: TriageApi,
    readonly reviewerId: string,
    private readonly campaignId: string,
    private readonly events: FlowEvents = {},
  ) {}

  get visibleItems(): TriageItem[] {
    if (!this.statusFilter) {
      return this.items;
    }
    return this.items.filter((i) => i.status === this.statusFilter);
  }

  async refresh(): Promise<void> {
    this.items = await this.api.listItems(this.campaignId);
    this.events.onItemsChanged?.(this.items);
  }

  async setFilter(status: string | null): Promise<void> {
    this.statusFilter = status;
    this.events.onItemsChanged?.(this.items);
  }

  item(itemId: string): TriageItem | undefined {
    return this.items.find((i) => i.item_id === itemId);
  }

  private replace(item: TriageItem): void {
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
  async vote(itemId: string, verdict: Verdict, note = ''): Promise<VoteOutcome> {
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
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        const fresh = await this.api.getItem(itemId);
        this.replace(fresh);
        return 'conflict-refreshed';
      }
      this.events.onError?.(error instanceof Error ? error.message : String(error));
      throw error;
    }
  }

  whatIf(attackText: string, thresholdPct = 58): Promise<PredictResponse> {
    return this.api.predict(attackText, thresholdPct);
  }
}
