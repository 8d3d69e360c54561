// Diff-style term highlighting: reviewers judge a semantic match by reading
// the attack and CVE texts side by side, so tokens shared by both texts are
// marked. Pure string work, no DOM.
const TOKEN_RE = /[a-z0-9][a-z0-9.\-/:]*/g;
// Function words carry no matching signal; highlighting them is noise.
const STOP_WORDS = new Set([
    'a', 'an', 'and', 'are', 'as', 'at', 'be', 'by', 'can', 'could', 'for',
    'from', 'has', 'have', 'in', 'into', 'is', 'it', 'its', 'may', 'not', 'of',
    'on', 'or', 'that', 'the', 'their', 'them', 'then', 'they', 'this', 'to',
    'use', 'used', 'via', 'when', 'which', 'with',
]);
export function tokenize(text) {
    return (text.toLowerCase().match(TOKEN_RE) ?? []).map((t) => t.replace(/[.,:]+$/, ''));
}
export function sharedTokens(left, right) {
    const leftTokens = new Set(tokenize(left));
    const shared = new Set();
    for (const token of tokenize(right)) {
        if (leftTokens.has(token) && !STOP_WORDS.has(token)) {
            shared.add(token);
        }
    }
    return shared;
}
/** Split a text into segments, marking tokens present in the shared set. */
export function segments(text, shared) {
    const out = [];
    let cursor = 0;
    for (const match of text.matchAll(/[A-Za-z0-9][A-Za-z0-9.\-/:]*/g)) {
        const start = match.index ?? 0;
        const token = match[0];
        const normalized = token.toLowerCase().replace(/[.,:]+$/, '');
        if (!shared.has(normalized)) {
            continue;
        }
        if (start > cursor) {
            out.push({ text: text.slice(cursor, start), shared: false });
        }
        out.push({ text: token, shared: true });
        cursor = start + token.length;
    }
    if (cursor < text.length) {
        out.push({ text: text.slice(cursor), shared: false });
    }
    return out;
}
