import { describe, expect, it } from "vitest";

import { backoffDelayMs, createSseParser, TransitionStream, type SseFrame, type StreamState } from "../src/sse.js";

describe("createSseParser", () => {
  it("assembles frames across arbitrary chunk boundaries", () => {
    const parser = createSseParser();
    expect(parser.push("id: 1\nev")).toEqual([]);
    const first = parser.push('ent: transition\ndata: {"seq":1}\n\nid: 2\n');
    expect(first).toEqual([{ id: "1", event: "transition", data: '{"seq":1}' }]);
    expect(parser.push("data: x\n\n")).toEqual([{ id: "2", data: "x" }]);
  });

  it("yields several frames from one chunk", () => {
    const parser = createSseParser();
    const frames = parser.push("data: a\n\ndata: b\n\n");
    expect(frames.map((f) => f.data)).toEqual(["a", "b"]);
  });

  it("ignores comment keep-alives", () => {
    const parser = createSseParser();
    expect(parser.push(": keep-alive\n\n: keep-alive\n\n")).toEqual([]);
  });

  it("parses the retry hint as a frame without data", () => {
    const parser = createSseParser();
    expect(parser.push("retry: 2000\n\n")).toEqual([{ retryMs: 2000 }]);
  });

  it("joins multiple data lines with newlines", () => {
    const parser = createSseParser();
    expect(parser.push("data: one\ndata: two\n\n")).toEqual([{ data: "one\ntwo" }]);
  });

  it("treats only the first colon as the separator", () => {
    const parser = createSseParser();
    expect(parser.push("data: a:b:c\n\n")).toEqual([{ data: "a:b:c" }]);
  });
});

describe("backoffDelayMs", () => {
  it("doubles from the base and caps at ten seconds", () => {
    expect([0, 1, 2, 3, 4, 5, 6].map((n) => backoffDelayMs(n))).toEqual([
      500, 1000, 2000, 4000, 8000, 10000, 10000,
    ]);
    expect(backoffDelayMs(0, 2000)).toBe(2000);
    expect(backoffDelayMs(3, 2000)).toBe(10000);
  });
});

function sseResponse(...blocks: string[]): Response {
  const encoder = new TextEncoder();
  const stream = new ReadableStream<Uint8Array>({
    start(controller) {
      for (const block of blocks) controller.enqueue(encoder.encode(block));
      controller.close();
    },
  });
  return new Response(stream, {
    status: 200,
    headers: { "content-type": "text/event-stream" },
  });
}

describe("TransitionStream", () => {
  it("resumes with the last seen id and backs off between drops", async () => {
    const requests: Array<Record<string, string>> = [];
    const delays: number[] = [];
    const events: SseFrame[] = [];
    const states: StreamState[] = [];

    let connection = 0;
    const stream = new TransitionStream({
      url: "http://example.invalid/api/operator/stream",
      headers: { "x-operator-token": "t" },
      fetchImpl: async (_url, init) => {
        connection += 1;
        requests.push({ ...((init?.headers ?? {}) as Record<string, string>) });
        if (connection === 1) {
          return sseResponse(
            "retry: 2000\n\n",
            'id: 1\nevent: transition\ndata: {"seq":1}\n\n',
            ': keep-alive\n\nid: 2\nevent: transition\ndata: {"seq":2}\n\n',
          );
        }
        if (connection === 2) {
          return sseResponse('id: 3\nevent: transition\ndata: {"seq":3}\n\n');
        }
        throw new Error("network down");
      },
      sleep: async (ms) => {
        delays.push(ms);
        if (events.length >= 3 && delays.length >= 3) stream.stop();
      },
      onEvent: (frame) => events.push(frame),
      onState: (state) => states.push(state),
    });

    await stream.run();

    expect(events.map((f) => f.data)).toEqual(['{"seq":1}', '{"seq":2}', '{"seq":3}']);
    expect(stream.lastEventId).toBe("3");
    expect(requests[0]!["last-event-id"]).toBeUndefined();
    expect(requests[1]!["last-event-id"]).toBe("2");
    expect(requests[2]!["last-event-id"]).toBe("3");
    // retry: 2000 from the server becomes the backoff base
    expect(delays[0]).toBe(2000);
    expect(delays[1]).toBe(2000);
    expect(delays[2]).toBe(4000);
    expect(states[0]).toBe("connecting");
    expect(states).toContain("open");
    expect(states).toContain("reconnecting");
    expect(states[states.length - 1]).toBe("stopped");
  });
});
