// Single state store behind the panel.  All mutations happen in response
// to server replies, never optimistically, and at most one request per
// session is in flight at any time.

import { ApiClient, ApiError } from './api.js';
import type { BusyKind, PanelState, SessionPayload } from './types.js';

export const NOTHING_USABLE_TOAST = 'The model returned nothing usable - the program was not changed.';

function initialState(): PanelState {
  return {
    sessionId: null,
    issues: [],
    code: {},
    transcript: [],
    busy: {},
    busyIssue: null,
    historyDepth: 0,
    canRevert: false,
    panelOpen: true,
    selectedSprite: null,
    chatScope: 'sprite',
    chatDraft: '',
    language: 'en',
    toast: null,
  };
}

export class PanelStore {
  state: PanelState = initialState();
  private listeners: Array<(state: PanelState) => void> = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: (state: PanelState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private set(patch: Partial<PanelState>): void {
    this.state = { ...this.state, ...patch };
    this.emit();
  }

  anyBusy(): boolean {
    return Object.values(this.state.busy).some(Boolean);
  }

  private begin(kind: BusyKind, issueId: string | null = null): boolean {
    if (this.anyBusy()) return false;
    this.set({ busy: { ...this.state.busy, [kind]: true }, busyIssue: issueId, toast: null });
    return true;
  }

  private end(kind: BusyKind): void {
    const busy = { ...this.state.busy };
    delete busy[kind];
    this.set({ busy, busyIssue: null });
  }

  private applySession(payload: SessionPayload): void {
    const sprites = Object.keys(payload.code).filter((name) => name !== 'Stage');
    const selected =
      this.state.selectedSprite && payload.code[this.state.selectedSprite] !== undefined
        ? this.state.selectedSprite
        : (sprites[0] ?? Object.keys(payload.code)[0] ?? null);
    this.set({
      sessionId: payload.session_id,
      issues: payload.issues,
      code: payload.code,
      selectedSprite: selected,
    });
  }

  // --- actions -----------------------------------------------------------

  async upload(archive: Blob | ArrayBuffer | Uint8Array, filename?: string): Promise<void> {
    if (!this.begin('upload')) return;
    try {
      const payload = await this.api.createSession(archive, filename);
      this.set({ transcript: [], historyDepth: 0, canRevert: false });
      this.applySession(payload);
    } catch (err) {
      this.set({ toast: describe(err) });
    } finally {
      this.end('upload');
    }
  }

  async explain(issueId: string): Promise<void> {
    if (!this.state.sessionId) return;
    if (!this.begin('explain', issueId)) return;
    try {
      const { issue } = await this.api.explain(this.state.sessionId, issueId, this.state.language);
      this.set({ issues: this.state.issues.map((i) => (i.id === issue.id ? issue : i)) });
    } catch (err) {
      this.set({ toast: describe(err) });
    } finally {
      this.end('explain');
    }
  }

  async fix(issueId: string): Promise<void> {
    if (!this.state.sessionId) return;
    if (!this.begin('fix', issueId)) return;
    try {
      const payload = await this.api.fix(this.state.sessionId, issueId, this.state.language);
      this.applySession(payload);
      const depth = this.state.historyDepth + 1;
      this.set({ historyDepth: depth, canRevert: depth > 0 });
    } catch (err) {
      if (err instanceof ApiError && err.code === 'NothingUsable') {
        this.set({ toast: NOTHING_USABLE_TOAST });
      } else {
        this.set({ toast: describe(err) });
      }
    } finally {
      this.end('fix');
    }
  }

  async ask(): Promise<void> {
    const question = this.state.chatDraft.trim();
    if (!this.state.sessionId || !question) return;
    if (!this.begin('ask')) return;
    const scope = this.state.chatScope;
    const sprite = this.state.selectedSprite;
    this.set({ transcript: [...this.state.transcript, { role: 'user', text: question }] });
    try {
      const { answer } = await this.api.ask(
        this.state.sessionId, question, scope, sprite, this.state.language,
      );
      this.set({
        transcript: [...this.state.transcript, { role: 'gpt', text: answer }],
        chatDraft: '',
      });
    } catch (err) {
      this.set({
        transcript: [...this.state.transcript, { role: 'error', text: describe(err) }],
      });
    } finally {
      this.end('ask');
    }
  }

  async revert(): Promise<void> {
    if (!this.state.sessionId || !this.state.canRevert) return;
    if (!this.begin('revert')) return;
    try {
      const payload = await this.api.revert(this.state.sessionId);
      this.applySession(payload);
      const depth = Math.max(0, this.state.historyDepth - 1);
      this.set({ historyDepth: depth, canRevert: depth > 0 });
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.set({ historyDepth: 0, canRevert: false });
      } else {
        this.set({ toast: describe(err) });
      }
    } finally {
      this.end('revert');
    }
  }

  // --- local-only state --------------------------------------------------

  togglePanel(): void {
    this.set({ panelOpen: !this.state.panelOpen });
  }

  setLanguage(tag: string): void {
    this.set({ language: tag });
  }

  setScope(scope: 'sprite' | 'program'): void {
    this.set({ chatScope: scope });
  }

  selectSprite(name: string): void {
    if (this.state.code[name] !== undefined) this.set({ selectedSprite: name });
  }

  setDraft(text: string): void {
    this.set({ chatDraft: text });
  }

  dismissToast(): void {
    this.set({ toast: null });
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return String(err);
}
