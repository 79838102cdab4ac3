// Wire types mirroring the backend's docs/api.md.

export interface IssueLocation {
  target: string;
  script: string | null;
  block: number | null;
}

export interface Issue {
  id: string;
  finder: string;
  kind: 'bug' | 'smell' | 'perfume';
  severity: 'info' | 'warn' | 'error';
  description: string;
  explanation: string | null;
  location: IssueLocation;
}

export interface FixOutcome {
  replaced: string[];
  added_scripts: string[];
  added_sprites: string[];
  dropped: Array<{ text: string; diagnostics: Array<{ line: number; column: number; message: string }> }>;
  attempts_used: number;
}

export interface SessionPayload {
  session_id: string;
  issues: Issue[];
  code: Record<string, string>;
  program?: string;
  outcome?: FixOutcome;
}

export interface ChatEntry {
  role: 'user' | 'gpt' | 'error';
  text: string;
}

export type BusyKind = 'upload' | 'explain' | 'fix' | 'ask' | 'revert';

export interface PanelState {
  sessionId: string | null;
  issues: Issue[];
  code: Record<string, string>;
  transcript: ChatEntry[];
  busy: Partial<Record<BusyKind, boolean>>;
  /** issue id a fix/explain request is currently running for */
  busyIssue: string | null;
  /** applied fixes not yet reverted; revert is available while > 0 */
  historyDepth: number;
  canRevert: boolean;
  panelOpen: boolean;
  selectedSprite: string | null;
  chatScope: 'sprite' | 'program';
  chatDraft: string;
  language: string;
  toast: string | null;
}
