// End-to-end panel flow against the real backend (mock provider), booted by
// globalSetup: upload -> explain -> fix -> revert, with rendered HTML checks.

import { readFileSync } from 'node:fs';
import { beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { renderApp, renderIssuePanel, EXPLAIN_LABEL, FIX_LABEL } from '../src/render.js';
import { PanelStore } from '../src/store.js';
import { ENV_FILE } from '../globalSetup.js';

interface E2eEnv {
  baseUrl: string;
  sb3Path: string;
  issueId: string;
}

let env: E2eEnv;
let archive: Uint8Array;

beforeAll(() => {
  env = JSON.parse(readFileSync(ENV_FILE, 'utf-8'));
  archive = new Uint8Array(readFileSync(env.sb3Path));
});

describe('panel against the live backend', () => {
  it('walks the full explain/fix/revert story', async () => {
    const store = new PanelStore(new ApiClient(env.baseUrl));

    await store.upload(archive, 'boat.sb3');
    expect(store.state.toast).toBeNull();
    expect(store.state.sessionId).toBeTruthy();
    expect(store.state.issues).toHaveLength(1);
    expect(store.state.issues[0].id).toBe(env.issueId);
    expect(store.state.code.Boat).toContain('when green flag clicked');

    // the issue card offers both model actions
    const card = renderIssuePanel(store.state);
    expect(card).toContain(EXPLAIN_LABEL);
    expect(card).toContain(FIX_LABEL);

    // explain appends warned text
    await store.explain(env.issueId);
    const explained = store.state.issues[0];
    expect(explained.explanation).toContain('Press the green flag');
    expect(explained.description).not.toContain('Press the green flag');
    const explainedHtml = renderIssuePanel(store.state);
    const explanationAt = explainedHtml.indexOf('issue-explanation');
    expect(explanationAt).toBeGreaterThan(-1);
    expect(explainedHtml.slice(0, explanationAt)).toContain('issue-description');
    expect(explainedHtml).toContain('llm-caution');

    // fix updates the code view and enables revert
    const snapshot = { ...store.state.code };
    await store.fix(env.issueId);
    expect(store.state.toast).toBeNull();
    expect(store.state.code.Boat).not.toBe(snapshot.Boat);
    expect(store.state.code.Boat).toContain('forever');
    expect(store.state.canRevert).toBe(true);
    expect(store.state.issues.every((i) => i.finder !== 'missing-loop')).toBe(true);

    // revert restores the exact pre-fix snapshot
    await store.revert();
    expect(store.state.code).toEqual(snapshot);
    expect(store.state.canRevert).toBe(false);
    expect(store.state.issues.map((i) => i.finder)).toEqual(['missing-loop']);
  });

  it('chats with sprite scope and shows the caution badge', async () => {
    const store = new PanelStore(new ApiClient(env.baseUrl));
    await store.upload(archive, 'boat.sb3');
    store.setDraft('What happens when the boat touches the swamp?');
    await store.ask();
    const entries = store.state.transcript;
    expect(entries.map((e) => e.role)).toEqual(['user', 'gpt']);
    expect(entries[1].text.length).toBeGreaterThan(0);

    const html = renderApp(store.state);
    expect(html).toContain('llm-caution');
  });

  it('reports a healthy mock backend', async () => {
    const client = new ApiClient(env.baseUrl);
    const health = await client.health();
    expect(health.status).toBe('ok');
    expect(health.provider).toBe('mock');
  });
});
