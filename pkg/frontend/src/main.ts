// Bootstrap: wire the flow to the DOM skeleton in index.html.

import { TriageApi } from './api.js';
import { ReviewFlow } from './state.js';
import {
  bindKeyboardShortcuts,
  renderCampaignPicker,
  renderDetail,
  renderItemList,
  renderPredictions,
} from './ui.js';

function must(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const api = new TriageApi('');
  const reviewerInput = must('reviewer-id') as HTMLInputElement;
  reviewerInput.value = localStorage.getItem('reviewer_id') ?? 'reviewer-1';

  let flow: ReviewFlow | null = null;
  let selectedItemId: string | null = null;

  const rerender = () => {
    if (!flow) return;
    renderItemList(must('item-list'), flow.visibleItems, selectedItemId, (itemId) => {
      selectedItemId = itemId;
      rerender();
    });
    const selected = selectedItemId ? flow.item(selectedItemId) : undefined;
    const detail = must('item-detail');
    if (selected) {
      renderDetail(detail, selected, flow.reviewerId, (verdict) => {
        void flow!.vote(selected.item_id, verdict).then(() => rerender());
      });
    } else {
      detail.replaceChildren();
    }
  };

  const openCampaign = async (campaignId: string) => {
    flow = new ReviewFlow(api, reviewerInput.value, campaignId, {
      onItemsChanged: () => rerender(),
      onError: (message) => {
        must('error-banner').textContent = message;
      },
    });
    selectedItemId = null;
    await flow.refresh();
  };

  renderCampaignPicker(must('campaign-picker'), await api.listCampaigns(), (campaignId) => {
    void openCampaign(campaignId);
  });

  reviewerInput.addEventListener('change', () => {
    localStorage.setItem('reviewer_id', reviewerInput.value);
    const picker = must('campaign-picker').querySelector('select');
    if (picker) void openCampaign((picker as HTMLSelectElement).value);
  });

  (must('status-filter') as HTMLSelectElement).addEventListener('change', (event) => {
    const value = (event.target as HTMLSelectElement).value;
    void flow?.setFilter(value === 'all' ? null : value);
  });

  must('refresh-button').addEventListener('click', () => void flow?.refresh());

  must('what-if-run').addEventListener('click', async () => {
    const text = (must('what-if-text') as HTMLTextAreaElement).value;
    const threshold = Number((must('what-if-threshold') as HTMLInputElement).value) || 58;
    if (!flow || !text.trim()) return;
    try {
      const response = await flow.whatIf(text, threshold);
      renderPredictions(must('what-if-results'), response);
    } catch (error) {
      must('error-banner').textContent =
        error instanceof Error ? error.message : String(error);
    }
  });

  bindKeyboardShortcuts(
    () => flow,
    () => selectedItemId,
    () => rerender(),
  );
}

void boot();
