// Thin fetch client for the feeding-robot service.  Every mutation the
// console performs goes through here; the view model itself never talks
// to the network.

import type { GradeVerdict, ServiceSchema, SessionInfo, StatePayload } from './types.js';

export interface CreateSessionOptions {
  prompt_version?: string;
  adapter?: string;
  time_scale?: number; // omit for the instant virtual clock
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export class ConsoleApi {
  constructor(
    readonly base: string,
    readonly token?: string,
  ) {
    this.base = base.replace(/\/+$/, '');
  }

  private headers(json: boolean): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h['Content-Type'] = 'application/json';
    if (this.token) h['Authorization'] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: this.headers(body !== undefined) };
    if (body !== undefined) init.body = JSON.stringify(body);
    const res = await fetch(this.base + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const parsed = await res.json();
        if (parsed && typeof parsed.detail === 'string') detail = parsed.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  health(): Promise<{ ok: boolean; version: string }> {
    return this.request('GET', '/healthz');
  }

  schema(): Promise<ServiceSchema> {
    return this.request('GET', '/schema');
  }

  createSession(opts: CreateSessionOptions = {}): Promise<SessionInfo> {
    return this.request('POST', '/sessions', opts);
  }

  // raw=true submits command text directly; raw=false sends a transcript
  // chunk so the server performs wake-phrase detection itself.
  command(sessionId: string, text: string, raw = true): Promise<{ queued: boolean }> {
    return this.request('POST', `/sessions/${sessionId}/command`, { text, raw });
  }

  control(sessionId: string, action: 'stop' | 'pause' | 'start' | 'continue' | 'resume'): Promise<{ applied: boolean; action: string }> {
    return this.request('POST', `/sessions/${sessionId}/control`, { action });
  }

  state(sessionId: string): Promise<StatePayload> {
    return this.request('GET', `/sessions/${sessionId}/state`);
  }

  grade(sessionId: string, task: string, defaultSpeed?: number): Promise<GradeVerdict> {
    const body: Record<string, unknown> = { task };
    if (defaultSpeed !== undefined) body['default_speed'] = defaultSpeed;
    return this.request('POST', `/sessions/${sessionId}/grade`, body);
  }

  deleteSession(sessionId: string): Promise<{ closed: boolean }> {
    return this.request('DELETE', `/sessions/${sessionId}`);
  }

  eventsUrl(sessionId: string, from: number, follow: boolean): string {
    return `${this.base}/sessions/${sessionId}/events?from=${from}&follow=${follow}`;
  }

  authHeaders(): Record<string, string> {
    return this.headers(false);
  }
}
