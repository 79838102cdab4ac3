// Browser entry point: mounts the store-driven renderer and delegates
// DOM events to store actions.

import { ApiClient } from './api.js';
import { renderApp } from './render.js';
import { PanelStore } from './store.js';

const BACKEND_URL =
  (window as unknown as { BLOCKAID_BACKEND?: string }).BLOCKAID_BACKEND ?? 'http://127.0.0.1:8080';

const store = new PanelStore(new ApiClient(BACKEND_URL));
const root = document.getElementById('app');
if (!root) throw new Error('missing #app mount point');

function rerender(): void {
  const active = document.activeElement as HTMLInputElement | null;
  const keepFocus = active?.classList.contains('chat-input');
  root!.innerHTML = renderApp(store.state);
  if (keepFocus) {
    const input = root!.querySelector<HTMLInputElement>('.chat-input');
    if (input) {
      input.focus();
      input.selectionStart = input.value.length;
    }
  }
}

store.subscribe(rerender);
rerender();

root.addEventListener('click', (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>('[data-action]');
  if (!target) return;
  const action = target.dataset.action;
  const issueId = target.dataset.issue;
  switch (action) {
    case 'explain':
      if (issueId) void store.explain(issueId);
      break;
    case 'fix':
      if (issueId) void store.fix(issueId);
      break;
    case 'revert':
      void store.revert();
      break;
    case 'ask':
      void store.ask();
      break;
    case 'toggle-panel':
      store.togglePanel();
      break;
    case 'select-sprite':
      if (target.dataset.sprite) store.selectSprite(target.dataset.sprite);
      break;
    case 'dismiss-toast':
      store.dismissToast();
      break;
    default:
      break;
  }
});

root.addEventListener('change', (event) => {
  const target = event.target as HTMLInputElement | HTMLSelectElement;
  if (target.matches('[data-action="upload"]')) {
    const file = (target as HTMLInputElement).files?.[0];
    if (file) void store.upload(file, file.name);
  } else if (target.matches('[data-action="language"]')) {
    store.setLanguage(target.value);
  } else if (target.matches('input[name="scope"]')) {
    store.setScope(target.value === 'program' ? 'program' : 'sprite');
  }
});

root.addEventListener('input', (event) => {
  const target = event.target as HTMLInputElement;
  if (target.matches('[data-action="draft"]')) {
    store.setDraft(target.value);
  }
});

root.addEventListener('keydown', (event) => {
  const target = event.target as HTMLElement;
  if (target.matches('[data-action="draft"]') && (event as KeyboardEvent).key === 'Enter') {
    void store.ask();
  }
});
