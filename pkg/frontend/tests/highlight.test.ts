import assert from 'node:assert/strict';
import { test } from 'node:test';

import { segments, sharedTokens, tokenize } from '../src/highlight.js';

test('tokenize lowercases and keeps version/path tokens', () => {
  assert.deepEqual(tokenize('WordPress plugin before 2.1.4 under /var/www'), [
    'wordpress',
    'plugin',
    'before',
    '2.1.4',
    'under',
    'var/www',
  ]);
});

test('shared tokens ignore stop words', () => {
  const shared = sharedTokens(
    'The attacker steals the session cookie',
    'The session cookie is exposed to the attacker',
  );
  assert.ok(shared.has('session'));
  assert.ok(shared.has('cookie'));
  assert.ok(shared.has('attacker'));
  assert.ok(!shared.has('the'));
  assert.ok(!shared.has('is'));
});

test('no overlap yields empty set', () => {
  assert.equal(sharedTokens('alpha beta', 'gamma delta').size, 0);
});

test('segments mark shared tokens and preserve the full text', () => {
  const text = 'Steal the session cookie now';
  const parts = segments(text, new Set(['session', 'cookie']));
  assert.equal(parts.map((p) => p.text).join(''), text);
  const marked = parts.filter((p) => p.shared).map((p) => p.text);
  assert.deepEqual(marked, ['session', 'cookie']);
});

test('segments match case-insensitively against normalized tokens', () => {
  const parts = segments('Session COOKIE theft', new Set(['session', 'cookie']));
  const marked = parts.filter((p) => p.shared).map((p) => p.text);
  assert.deepEqual(marked, ['Session', 'COOKIE']);
});

test('segments of empty text is empty', () => {
  assert.deepEqual(segments('', new Set(['x'])), []);
});
