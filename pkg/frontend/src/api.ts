// Thin client for the analysis backend; every method maps to one endpoint.

import type { SessionPayload, Issue } from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, 'NetworkError', String(err));
    }
    let body: unknown = null;
    const text = await response.text();
    try {
      body = text ? JSON.parse(text) : null;
    } catch {
      body = null;
    }
    if (!response.ok) {
      const record = (body ?? {}) as { error?: string; message?: string };
      throw new ApiError(response.status, record.error ?? 'HttpError', record.message ?? text);
    }
    return body as T;
  }

  createSession(archive: Blob | ArrayBuffer | Uint8Array, filename = 'program.sb3'): Promise<SessionPayload> {
    const data = new FormData();
    const blob = archive instanceof Blob ? archive : new Blob([archive as BlobPart]);
    data.append('file', blob, filename);
    return this.request('/sessions', { method: 'POST', body: data });
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  explain(sessionId: string, issueId: string, language: string): Promise<{ issue: Issue }> {
    return this.request(
      `/sessions/${encodeURIComponent(sessionId)}/issues/${encodeURIComponent(issueId)}/explain`,
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ language }),
      },
    );
  }

  fix(sessionId: string, issueId: string, language: string): Promise<SessionPayload> {
    return this.request(
      `/sessions/${encodeURIComponent(sessionId)}/issues/${encodeURIComponent(issueId)}/fix`,
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ language }),
      },
    );
  }

  ask(
    sessionId: string,
    question: string,
    scope: 'sprite' | 'program',
    sprite: string | null,
    language: string,
  ): Promise<{ answer: string }> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/ask`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ question, scope, sprite: scope === 'sprite' ? sprite : null, language }),
    });
  }

  revert(sessionId: string): Promise<SessionPayload> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/revert`, { method: 'POST' });
  }

  health(): Promise<{ status: string; provider: string; model: string }> {
    return this.request('/health');
  }
}
