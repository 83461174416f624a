// Fetch-based SSE consumption (EventSource cannot send the Authorization
// header).  The parser is incremental: feed it raw text chunks as they
// arrive and it yields complete frames, however the chunks were split.

import type { WireEvent } from './types.js';
import type { ConsoleApi } from './api.js';

export interface SseFrame {
  id?: number;
  event?: string; // absent for plain data frames; 'gone' when history was evicted
  data: string;
}

export class SseParser {
  private buffer = '';

  feed(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    for (;;) {
      const cut = this.buffer.indexOf('\n\n');
      if (cut < 0) break;
      const block = this.buffer.slice(0, cut);
      this.buffer = this.buffer.slice(cut + 2);
      const frame: SseFrame = { data: '' };
      const dataLines: string[] = [];
      for (const line of block.split('\n')) {
        if (line.startsWith('id:')) frame.id = parseInt(line.slice(3).trim(), 10);
        else if (line.startsWith('event:')) frame.event = line.slice(6).trim();
        else if (line.startsWith('data:')) dataLines.push(line.slice(5).trimStart());
      }
      frame.data = dataLines.join('\n');
      frames.push(frame);
    }
    return frames;
  }
}

export type StreamStatus = 'connecting' | 'live' | 'reconnecting' | 'gone' | 'stopped';

export interface EventStreamOptions {
  from?: number;
  onEvent: (ev: WireEvent) => void;
  onStatus?: (status: StreamStatus) => void;
  retryMs?: number;
}

// Ordered, resumable consumption of one session's event stream.  Reconnects
// from the last applied seq; duplicate seqs (replayed on resume) are dropped
// so the onEvent callback sees each event exactly once, in order.
export class EventStream {
  private abort: AbortController | null = null;
  private nextSeq: number;
  private stopped = false;
  private readonly retryMs: number;

  constructor(
    private readonly api: ConsoleApi,
    private readonly sessionId: string,
    private readonly opts: EventStreamOptions,
  ) {
    this.nextSeq = opts.from ?? 0;
    this.retryMs = opts.retryMs ?? 1000;
  }

  get cursor(): number {
    return this.nextSeq;
  }

  start(): void {
    this.stopped = false;
    void this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.abort?.abort();
    this.abort = null;
    this.opts.onStatus?.('stopped');
  }

  private async connect(): Promise<void> {
    while (!this.stopped) {
      this.abort = new AbortController();
      this.opts.onStatus?.(this.nextSeq === 0 ? 'connecting' : 'reconnecting');
      try {
        const res = await fetch(this.api.eventsUrl(this.sessionId, this.nextSeq, true), {
          headers: this.api.authHeaders(),
          signal: this.abort.signal,
        });
        if (res.status === 410) {
          // our cursor was evicted from the ring; restart from what remains
          const state = await this.api.state(this.sessionId);
          this.nextSeq = state.events?.first_retained ?? 0;
          this.opts.onStatus?.('gone');
          continue;
        }
        if (!res.ok || !res.body) throw new Error(`stream failed: ${res.status}`);
        this.opts.onStatus?.('live');
        await this.consume(res.body);
      } catch (err) {
        if ((err as { name?: string }).name === 'AbortError') return;
      }
      if (this.stopped) return;
      await new Promise((r) => setTimeout(r, this.retryMs));
    }
  }

  private async consume(body: ReadableStream<Uint8Array>): Promise<void> {
    const reader = body.getReader();
    const decoder = new TextDecoder();
    const parser = new SseParser();
    for (;;) {
      const { done, value } = await reader.read();
      if (done) return;
      for (const frame of parser.feed(decoder.decode(value, { stream: true }))) {
        if (frame.event === 'gone') {
          this.opts.onStatus?.('gone');
          return; // outer loop reconnects; 410 path will resync the cursor
        }
        if (!frame.data) continue;
        const ev = JSON.parse(frame.data) as WireEvent;
        if (ev.seq < this.nextSeq) continue; // duplicate from a resume
        this.nextSeq = ev.seq + 1;
        this.opts.onEvent(ev);
      }
    }
  }
}

// One-shot collection (follow=false): everything retained from `from` up to
// the moment of the request.  Used for replay folds and the self-audit.
export async function fetchEvents(api: ConsoleApi, sessionId: string, from = 0): Promise<WireEvent[]> {
  const res = await fetch(api.eventsUrl(sessionId, from, false), { headers: api.authHeaders() });
  if (!res.ok) throw new Error(`events fetch failed: ${res.status}`);
  const parser = new SseParser();
  const out: WireEvent[] = [];
  for (const frame of parser.feed(await res.text())) {
    if (frame.event === 'gone' || !frame.data) continue;
    out.push(JSON.parse(frame.data) as WireEvent);
  }
  return out;
}
