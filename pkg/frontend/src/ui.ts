// DOM rendering. Views are dumb: they draw whatever state the flow holds and
// forward user intent back to it. Status text always comes from the server's
// item payload, never from local vote counting.

import { segments, sharedTokens } from './highlight.js';
import { activeRound, canVote, ReviewFlow } from './state.js';
import type { Campaign, PredictResponse, TriageItem } from './types.js';

type ItemWithText = TriageItem & { attack_text?: string; cve_text?: string };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function scoreBadge(scorePct: number): HTMLElement {
  const badge = el('span', 'score-badge', `${scorePct.toFixed(1)}%`);
  badge.classList.add(scorePct >= 75 ? 'score-high' : scorePct >= 58 ? 'score-mid' : 'score-low');
  return badge;
}

export function renderCampaignPicker(
  root: HTMLElement,
  campaigns: Campaign[],
  onPick: (campaignId: string) => void,
): void {
  root.replaceChildren();
  const select = el('select', 'campaign-picker');
  for (const campaign of campaigns) {
    const option = el('option');
    option.value = campaign.campaign_id;
    option.textContent =
      `${campaign.campaign_id} (${campaign.item_count} items, ` +
      `rho=${campaign.threshold_pct}%)`;
    select.appendChild(option);
  }
  select.addEventListener('change', () => onPick(select.value));
  root.appendChild(select);
  if (campaigns.length > 0) {
    onPick(campaigns[0].campaign_id);
  }
}

export function renderItemList(
  root: HTMLElement,
  items: TriageItem[],
  selectedId: string | null,
  onSelect: (itemId: string) => void,
): void {
  root.replaceChildren();
  for (const item of items) {
    const row = el('div', 'item-row');
    if (item.item_id === selectedId) row.classList.add('selected');
    row.appendChild(scoreBadge(item.score_pct));
    row.appendChild(el('span', 'item-pair', `${item.attack_id} → ${item.cve_id}`));
    row.appendChild(el('span', `status status-${item.status}`, item.status));
    row.addEventListener('click', () => onSelect(item.item_id));
    root.appendChild(row);
  }
  if (items.length === 0) {
    root.appendChild(el('p', 'empty-hint', 'no items match this filter'));
  }
}

function renderHighlighted(pane: HTMLElement, text: string, shared: Set<string>): void {
  pane.replaceChildren();
  if (!text) {
    pane.appendChild(
      el('p', 'empty-hint', 'no text available (serve with --snapshot to load descriptions)'),
    );
    return;
  }
  for (const segment of segments(text, shared)) {
    if (segment.shared) {
      pane.appendChild(el('mark', 'shared-token', segment.text));
    } else {
      pane.appendChild(document.createTextNode(segment.text));
    }
  }
}

export function renderDetail(
  root: HTMLElement,
  item: ItemWithText,
  reviewerId: string,
  onVote: (verdict: 'link' | 'no_link') => void,
): void {
  root.replaceChildren();
  const header = el('div', 'detail-header');
  header.appendChild(el('h2', '', `${item.attack_id} → ${item.cve_id}`));
  header.appendChild(scoreBadge(item.score_pct));
  header.appendChild(el('span', `status status-${item.status}`, item.status));
  header.appendChild(el('span', 'round-label', `round ${activeRound(item)}`));
  root.appendChild(header);

  const panes = el('div', 'panes');
  const shared = sharedTokens(item.attack_text ?? '', item.cve_text ?? '');
  const attackPane = el('div', 'pane');
  attackPane.appendChild(el('h3', '', `attack ${item.attack_id}`));
  const attackBody = el('div', 'pane-text');
  renderHighlighted(attackBody, item.attack_text ?? '', shared);
  attackPane.appendChild(attackBody);
  const cvePane = el('div', 'pane');
  cvePane.appendChild(el('h3', '', `vulnerability ${item.cve_id}`));
  const cveBody = el('div', 'pane-text');
  renderHighlighted(cveBody, item.cve_text ?? '', shared);
  cvePane.appendChild(cveBody);
  panes.appendChild(attackPane);
  panes.appendChild(cvePane);
  root.appendChild(panes);

  const votes = el('div', 'vote-bar');
  const allowed = canVote(item, reviewerId);
  const linkButton = el('button', 'vote-link', 'link (L)');
  const noLinkButton = el('button', 'vote-no-link', 'no link (N)');
  linkButton.disabled = !allowed;
  noLinkButton.disabled = !allowed;
  linkButton.addEventListener('click', () => onVote('link'));
  noLinkButton.addEventListener('click', () => onVote('no_link'));
  votes.appendChild(linkButton);
  votes.appendChild(noLinkButton);
  if (!allowed) {
    votes.appendChild(el('span', 'vote-hint', 'voting closed for you on this round'));
  }
  root.appendChild(votes);

  const history = el('div', 'review-history');
  history.appendChild(el('h3', '', 'reviews'));
  for (const review of item.reviews) {
    history.appendChild(
      el(
        'div',
        'review-row',
        `round ${review.round}: ${review.reviewer_id} voted ${review.verdict}` +
          (review.note ? ` — ${review.note}` : ''),
      ),
    );
  }
  if (item.reviews.length === 0) {
    history.appendChild(el('p', 'empty-hint', 'no votes yet'));
  }
  root.appendChild(history);
}

export function renderPredictions(root: HTMLElement, response: PredictResponse): void {
  root.replaceChildren();
  root.appendChild(
    el('h3', '', `ranked CVEs (threshold ${response.threshold_pct}%, ${response.backend_id})`),
  );
  for (const prediction of response.predictions) {
    const row = el('div', 'prediction-row');
    row.appendChild(scoreBadge(prediction.score_pct));
    row.appendChild(el('span', 'item-pair', prediction.cve_id));
    if (prediction.predicted) {
      row.appendChild(el('span', 'status status-accepted', 'above threshold'));
    }
    root.appendChild(row);
  }
  if (response.predictions.length === 0) {
    root.appendChild(el('p', 'empty-hint', 'no CVEs ranked'));
  }
}

export function bindKeyboardShortcuts(
  getFlow: () => ReviewFlow | null,
  getSelected: () => string | null,
  afterVote: () => void,
): void {
  document.addEventListener('keydown', (event) => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === 'TEXTAREA' || target.tagName === 'INPUT')) {
      return;
    }
    const flow = getFlow();
    const selected = getSelected();
    if (!flow || !selected) return;
    if (event.key === 'l') void flow.vote(selected, 'link').then(afterVote);
    if (event.key === 'n') void flow.vote(selected, 'no_link').then(afterVote);
  });
}
