// Pure HTML renderers over the panel state.  Every region holding
// model-generated text carries the caution badge; all model-facing labels
// say "GPT" no matter which backend is configured.

import { highlightCode, escapeHtml } from './highlight.js';
import type { Issue, PanelState } from './types.js';

export const GPT_WARNING_HINT =
  'GPT wrote this - it can be wrong or misleading. Check the result before trusting it.';

export const EXPLAIN_LABEL = 'GPT: Explain!';
export const FIX_LABEL = 'GPT: Fix!';

export function cautionBadge(): string {
  return `<span class="llm-caution" role="img" aria-label="caution" title="${escapeHtml(GPT_WARNING_HINT)}">&#10071;</span>`;
}

export function renderIssueCard(issue: Issue, state: PanelState): string {
  const busyHere = state.busyIssue === issue.id;
  const fixDisabled = state.busy.fix || state.busy.explain || state.busy.revert || state.busy.ask;
  const explanation = issue.explanation
    ? `<div class="issue-explanation">${cautionBadge()}<p>${escapeHtml(issue.explanation)}</p></div>`
    : '';
  return [
    `<article class="issue-card kind-${issue.kind}" data-issue="${escapeHtml(issue.id)}">`,
    `<header><span class="issue-kind">${issue.kind}</span>`,
    `<span class="issue-location">${escapeHtml(issue.location.target)}${issue.location.script ? ' / ' + escapeHtml(issue.location.script) : ''}</span></header>`,
    `<p class="issue-description">${escapeHtml(issue.description)}</p>`,
    explanation,
    '<footer>',
    `<button data-action="explain" data-issue="${escapeHtml(issue.id)}"${fixDisabled ? ' disabled' : ''}>${EXPLAIN_LABEL}</button>`,
    `<button data-action="fix" data-issue="${escapeHtml(issue.id)}"${fixDisabled ? ' disabled' : ''}>${FIX_LABEL}</button>`,
    busyHere ? '<span class="spinner" aria-label="working"></span>' : '',
    '</footer>',
    '</article>',
  ].join('');
}

export function renderIssuePanel(state: PanelState): string {
  const toggle = `<button data-action="toggle-panel" class="panel-toggle">${state.panelOpen ? 'Hide issues' : 'Show issues'}</button>`;
  if (!state.panelOpen) {
    return `<aside class="issue-panel closed">${toggle}</aside>`;
  }
  const body = state.issues.length
    ? state.issues.map((issue) => renderIssueCard(issue, state)).join('')
    : '<p class="empty-state">No issues found. Nice and tidy!</p>';
  return `<aside class="issue-panel open">${toggle}${body}</aside>`;
}

export function renderCodeView(state: PanelState): string {
  const names = Object.keys(state.code);
  if (!names.length) {
    return '<section class="code-view empty"><p>Upload a project to see its code.</p></section>';
  }
  const tabs = names
    .map((name) => {
      const active = name === state.selectedSprite ? ' active' : '';
      return `<button data-action="select-sprite" data-sprite="${escapeHtml(name)}" class="tab${active}">${escapeHtml(name)}</button>`;
    })
    .join('');
  const selected = state.selectedSprite ?? names[0];
  const code = state.code[selected] ?? '';
  return [
    '<section class="code-view">',
    `<nav class="sprite-tabs">${tabs}</nav>`,
    `<pre class="code"><code>${highlightCode(code)}</code></pre>`,
    '</section>',
  ].join('');
}

export function renderChat(state: PanelState): string {
  const entries = state.transcript
    .map((entry) => {
      if (entry.role === 'gpt') {
        return `<div class="chat-entry gpt">${cautionBadge()}<p>${escapeHtml(entry.text)}</p></div>`;
      }
      if (entry.role === 'error') {
        return `<div class="chat-entry error"><p>${escapeHtml(entry.text)}</p></div>`;
      }
      return `<div class="chat-entry user"><p>${escapeHtml(entry.text)}</p></div>`;
    })
    .join('');
  const sendDisabled = !state.chatDraft.trim() || state.busy.ask || !state.sessionId;
  const spriteChecked = state.chatScope === 'sprite' ? ' checked' : '';
  const programChecked = state.chatScope === 'program' ? ' checked' : '';
  return [
    '<section class="chat">',
    '<header>Ask GPT about your project</header>',
    `<div class="chat-transcript">${entries}</div>`,
    '<div class="chat-scope">',
    `<label><input type="radio" name="scope" value="sprite"${spriteChecked}> this sprite</label>`,
    `<label><input type="radio" name="scope" value="program"${programChecked}> whole program</label>`,
    '</div>',
    `<input class="chat-input" data-action="draft" value="${escapeHtml(state.chatDraft)}" placeholder="Type a question...">`,
    `<button data-action="ask"${sendDisabled ? ' disabled' : ''}>Send</button>`,
    '</section>',
  ].join('');
}

export function renderToolbar(state: PanelState): string {
  const revertDisabled = !state.canRevert || state.busy.fix || state.busy.revert;
  const languages: Array<[string, string]> = [
    ['en', 'English'],
    ['de', 'Deutsch'],
    ['fr', 'Francais'],
    ['es', 'Espanol'],
  ];
  const options = languages
    .map(([tag, label]) => `<option value="${tag}"${tag === state.language ? ' selected' : ''}>${label}</option>`)
    .join('');
  return [
    '<header class="toolbar">',
    '<input type="file" accept=".sb3" data-action="upload">',
    `<button data-action="revert"${revertDisabled ? ' disabled' : ''}>Revert last fix</button>`,
    `<select data-action="language">${options}</select>`,
    '</header>',
  ].join('');
}

export function renderToast(state: PanelState): string {
  if (!state.toast) return '';
  return `<div class="toast" role="alert">${escapeHtml(state.toast)}<button data-action="dismiss-toast">x</button></div>`;
}

export function renderApp(state: PanelState): string {
  return [
    renderToolbar(state),
    '<main class="layout">',
    renderCodeView(state),
    renderIssuePanel(state),
    '</main>',
    renderChat(state),
    renderToast(state),
  ].join('');
}
