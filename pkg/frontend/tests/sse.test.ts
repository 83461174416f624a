import { describe, expect, it } from 'vitest';
import { SseParser } from '../src/sse.js';

const frame = (seq: number, body: unknown) => `id: ${seq}\ndata: ${JSON.stringify(body)}\n\n`;

describe('SseParser', () => {
  it('parses one complete frame', () => {
    const parser = new SseParser();
    const frames = parser.feed(frame(7, { type: 'cue' }));
    expect(frames).toHaveLength(1);
    expect(frames[0]!.id).toBe(7);
    expect(JSON.parse(frames[0]!.data)).toEqual({ type: 'cue' });
  });

  it('parses several frames arriving in a single chunk', () => {
    const parser = new SseParser();
    const frames = parser.feed(frame(0, { a: 1 }) + frame(1, { a: 2 }) + frame(2, { a: 3 }));
    expect(frames.map((f) => f.id)).toEqual([0, 1, 2]);
  });

  it('buffers frames split across arbitrary chunk boundaries', () => {
    const parser = new SseParser();
    const text = frame(0, { hello: 'world' }) + frame(1, { second: true });
    const collected = [];
    // split one byte at a time: the worst case a network can do
    for (const ch of text) collected.push(...parser.feed(ch));
    expect(collected).toHaveLength(2);
    expect(JSON.parse(collected[0]!.data)).toEqual({ hello: 'world' });
    expect(JSON.parse(collected[1]!.data)).toEqual({ second: true });
  });

  it('keeps an incomplete trailing frame pending until completed', () => {
    const parser = new SseParser();
    expect(parser.feed('id: 3\ndata: {"x"')).toHaveLength(0);
    const frames = parser.feed(': 1}\n\n');
    expect(frames).toHaveLength(1);
    expect(frames[0]!.id).toBe(3);
    expect(JSON.parse(frames[0]!.data)).toEqual({ x: 1 });
  });

  it('recognizes the eviction sentinel frame', () => {
    const parser = new SseParser();
    const frames = parser.feed('event: gone\ndata: {}\n\n');
    expect(frames).toHaveLength(1);
    expect(frames[0]!.event).toBe('gone');
  });

  it('joins multi-line data per the SSE contract', () => {
    const parser = new SseParser();
    const frames = parser.feed('data: line one\ndata: line two\n\n');
    expect(frames[0]!.data).toBe('line one\nline two');
  });
});
