// Round trip against the real server: votes flow through the documented API,
// the server applies the agreement rule, and the flow re-renders exactly the
// server's status. The what-if panel must surface the raw /predict response.

import assert from 'node:assert/strict';
import { spawn, type ChildProcess } from 'node:child_process';
import { fileURLToPath } from 'node:url';
import path from 'node:path';
import { after, before, test } from 'node:test';

import { TriageApi } from '../src/api.js';
import { ReviewFlow } from '../src/state.js';

const PORT = 8300 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
const HERE = path.dirname(fileURLToPath(import.meta.url));
// dist-test/tests -> frontend/tests
const SERVER_SCRIPT = path.resolve(HERE, '../../tests/serve_fixture.py');

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/campaigns`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error('triage server did not come up');
}

before(async () => {
  server = spawn('python3', [SERVER_SCRIPT, String(PORT)], { stdio: 'ignore' });
  await waitForServer();
});

after(() => {
  server.kill('SIGTERM');
});

test('campaign and items load with entity texts', async () => {
  const api = new TriageApi(BASE);
  const campaigns = await api.listCampaigns();
  assert.equal(campaigns.length, 1);
  assert.equal(campaigns[0].campaign_id, 'ui-campaign');
  const items = await api.listItems('ui-campaign');
  assert.equal(items.length, 3);
  const first = items[0] as { attack_text?: string; cve_text?: string };
  assert.ok(first.attack_text && first.attack_text.length > 0);
  assert.ok(first.cve_text && first.cve_text.length > 0);
});

test('vote round trip: server applies the agreement rule, UI re-renders it', async () => {
  const api = new TriageApi(BASE);
  const flowA = new ReviewFlow(api, 'alice', 'ui-campaign');
  const flowB = new ReviewFlow(api, 'bob', 'ui-campaign');
  await flowA.refresh();
  await flowB.refresh();
  const itemId = flowA.items[0].item_id;

  assert.equal(await flowA.vote(itemId, 'link'), 'applied');
  // One vote: not final by the server's rule.
  assert.equal(flowA.item(itemId)!.status, 'pending');
  assert.equal(flowA.item(itemId)!.status, (await api.getItem(itemId)).status);

  // Bob rendered version 0, so his first attempt conflicts and refetches.
  const outcome = await flowB.vote(itemId, 'link');
  assert.equal(outcome, 'conflict-refreshed');
  assert.equal(flowB.item(itemId)!.version, (await api.getItem(itemId)).version);

  // With the fresh version the vote applies and agreement is reached.
  assert.equal(await flowB.vote(itemId, 'link'), 'applied');
  assert.equal(flowB.item(itemId)!.status, 'accepted');
  assert.equal(flowB.item(itemId)!.status, (await api.getItem(itemId)).status);

  const exported = await api.exportCampaign('ui-campaign');
  assert.equal(exported.summary['accepted'], 1);
});

test('contested then settled across rounds, all server-driven', async () => {
  const api = new TriageApi(BASE);
  const carol = new ReviewFlow(api, 'carol', 'ui-campaign');
  const dave = new ReviewFlow(api, 'dave', 'ui-campaign');
  await carol.refresh();
  const itemId = carol.items.find((i) => i.status === 'pending')!.item_id;

  await carol.vote(itemId, 'link');
  await dave.refresh();
  await dave.vote(itemId, 'no_link');
  assert.equal(dave.item(itemId)!.status, 'contested');

  // Round 2: both vote no_link; the server flips to rejected.
  await carol.refresh();
  await carol.vote(itemId, 'no_link');
  await dave.refresh();
  await dave.vote(itemId, 'no_link');
  assert.equal(dave.item(itemId)!.status, 'rejected');
  assert.equal((await api.getItem(itemId)).status, 'rejected');
});

test('what-if panel output equals the raw /predict response', async () => {
  const api = new TriageApi(BASE);
  const flow = new ReviewFlow(api, 'alice', 'ui-campaign');
  const text = 'An adversary may steal web application session cookies.';

  const viaFlow = await flow.whatIf(text, 10);
  const raw = await fetch(`${BASE}/predict`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify({ attack_text: text, threshold_pct: 10, top_k: 25 }),
  }).then((r) => r.json());

  assert.deepEqual(viaFlow, raw);
  const topIds = viaFlow.predictions.slice(0, 2).map((p) => p.cve_id).sort();
  assert.deepEqual(topIds, ['CVE-2020-1111', 'CVE-2020-2222']);
});
