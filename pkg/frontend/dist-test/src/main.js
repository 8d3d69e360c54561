// Bootstrap: wire the flow to the DOM skeleton in index.html.
import { TriageApi } from './api.js';
import { ReviewFlow } from './state.js';
import { bindKeyboardShortcuts, renderCampaignPicker, renderDetail, renderItemList, renderPredictions, } from './ui.js';
function must(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing #${id}`);
    return node;
}
async function boot() {
    const api = new TriageApi('');
    const reviewerInput = must('reviewer-id');
    reviewerInput.value = localStorage.getItem('reviewer_id') ?? 'reviewer-1';
    let flow = null;
    let selectedItemId = null;
    const rerender = () => {
        if (!flow)
            return;
        renderItemList(must('item-list'), flow.visibleItems, selectedItemId, (itemId) => {
            selectedItemId = itemId;
            rerender();
        });
        const selected = selectedItemId ? flow.item(selectedItemId) : undefined;
        const detail = must('item-detail');
        if (selected) {
            renderDetail(detail, selected, flow.reviewerId, (verdict) => {
                void flow.vote(selected.item_id, verdict).then(() => rerender());
            });
        }
        else {
            detail.replaceChildren();
        }
    };
    const openCampaign = async (campaignId) => {
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
        if (picker)
            void openCampaign(picker.value);
    });
    must('status-filter').addEventListener('change', (event) => {
        const value = event.target.value;
        void flow?.setFilter(value === 'all' ? null : value);
    });
    must('refresh-button').addEventListener('click', () => void flow?.refresh());
    must('what-if-run').addEventListener('click', async () => {
        const text = must('what-if-text').value;
        const threshold = Number(must('what-if-threshold').value) || 58;
        if (!flow || !text.trim())
            return;
        try {
            const response = await flow.whatIf(text, threshold);
            renderPredictions(must('what-if-results'), response);
        }
        catch (error) {
            must('error-banner').textContent =
                error instanceof Error ? error.message : String(error);
        }
    });
    bindKeyboardShortcuts(() => flow, () => selectedItemId, () => rerender());
}
void boot();
