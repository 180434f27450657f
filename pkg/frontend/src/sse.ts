import type { FetchLike } from "./api.js";

export interface SseFrame {
  id?: string;
  event?: string;
  data?: string;
  retryMs?: number;
}

/** Incremental parser for a text/event-stream feed; frames end on a blank line. */
export function createSseParser(): { push(chunk: string): SseFrame[] } {
  let buffer = "";
  return {
    push(chunk: string): SseFrame[] {
      buffer += chunk;
      const frames: SseFrame[] = [];
      let cut: number;
      while ((cut = buffer.indexOf("\n\n")) !== -1) {
        const block = buffer.slice(0, cut);
        buffer = buffer.slice(cut + 2);
        const frame = parseBlock(block);
        if (frame) frames.push(frame);
      }
      return frames;
    },
  };
}

function parseBlock(block: string): SseFrame | null {
  const frame: SseFrame = {};
  const data: string[] = [];
  let sawField = false;
  for (const raw of block.split("\n")) {
    const line = raw.endsWith("\r") ? raw.slice(0, -1) : raw;
    if (!line || line.startsWith(":")) continue;
    const colon = line.indexOf(":");
    const field = colon === -1 ? line : line.slice(0, colon);
    let value = colon === -1 ? "" : line.slice(colon + 1);
    if (value.startsWith(" ")) value = value.slice(1);
    sawField = true;
    if (field === "data") data.push(value);
    else if (field === "id") frame.id = value;
    else if (field === "event") frame.event = value;
    else if (field === "retry") {
      const ms = Number(value);
      if (Number.isFinite(ms) && ms >= 0) frame.retryMs = ms;
    }
  }
  if (!sawField) return null;
  if (data.length) frame.data = data.join("\n");
  return frame;
}

export function backoffDelayMs(attempt: number, baseMs = 500): number {
  return Math.min(10000, baseMs * 2 ** attempt);
}

export type StreamState = "connecting" | "open" | "reconnecting" | "stopped";

export interface StreamOptions {
  url: string;
  headers?: Record<string, string>;
  fetchImpl?: FetchLike;
  onEvent: (frame: SseFrame) => void;
  onState?: (state: StreamState) => void;
  /** Injectable for tests; real timers otherwise. */
  sleep?: (ms: number) => Promise<void>;
}

const wait = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/** Long-lived transition feed: resumes from the last seen id, backs off on drops. */
export class TransitionStream {
  lastEventId: string | null = null;

  private stopped = false;
  private everConnected = false;
  private retryBaseMs: number | undefined;
  private controller: AbortController | null = null;
  private readonly fetchImpl: FetchLike;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(private readonly options: StreamOptions) {
    this.fetchImpl = options.fetchImpl ?? ((input, init) => fetch(input, init));
    this.sleep = options.sleep ?? wait;
  }

  stop(): void {
    this.stopped = true;
    this.controller?.abort();
    this.options.onState?.("stopped");
  }

  async run(): Promise<void> {
    let attempt = 0;
    while (!this.stopped) {
      this.options.onState?.(this.everConnected ? "reconnecting" : "connecting");
      this.controller = new AbortController();
      try {
        const headers: Record<string, string> = {
          accept: "text/event-stream",
          ...this.options.headers,
        };
        if (this.lastEventId) headers["last-event-id"] = this.lastEventId;
        const res = await this.fetchImpl(this.options.url, {
          headers,
          signal: this.controller.signal,
        });
        if (!res.ok || !res.body) throw new Error(`stream request failed: ${res.status}`);
        this.everConnected = true;
        attempt = 0;
        this.options.onState?.("open");
        const reader = res.body.getReader();
        const decoder = new TextDecoder();
        const parser = createSseParser();
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
            if (frame.retryMs !== undefined) this.retryBaseMs = frame.retryMs;
            if (frame.id !== undefined) this.lastEventId = frame.id;
            if (frame.data !== undefined) this.options.onEvent(frame);
          }
        }
      } catch {
        // drop through to the retry delay
      }
      if (this.stopped) break;
      await this.sleep(backoffDelayMs(attempt, this.retryBaseMs));
      attempt += 1;
    }
  }
}
