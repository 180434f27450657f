import type { FetchLike, OperatorApi } from "./api.js";
import { TransitionStream, type SseFrame, type StreamState } from "./sse.js";
import {
  applySnapshot,
  applyTransition,
  initialDashboard,
  type DashboardState,
} from "./state.js";
import type { Transition } from "./types.js";
import { renderDashboard } from "./views.js";

export interface DashboardOptions {
  fetchImpl?: FetchLike;
  onChange?: (state: DashboardState) => void;
  /** Snapshot poll cadence while the stream is down. */
  pollIntervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

/**
 * Operator dashboard: one snapshot to seed, then the transition stream.
 * While the stream is down it falls back to polling the status endpoint.
 */
export class DashboardController {
  state: DashboardState = initialDashboard();

  private stream: TransitionStream | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private runPromise: Promise<void> | null = null;

  constructor(
    private readonly api: OperatorApi,
    private readonly options: DashboardOptions = {},
  ) {}

  async start(): Promise<void> {
    await this.refreshSnapshot();
    this.stream = new TransitionStream({
      url: this.api.streamUrl(this.state.lastSeq),
      headers: this.api.headers,
      fetchImpl: this.options.fetchImpl,
      sleep: this.options.sleep,
      onEvent: (frame) => this.onFrame(frame),
      onState: (streamState) => this.onStreamState(streamState),
    });
    this.runPromise = this.stream.run();
  }

  async stop(): Promise<void> {
    this.stream?.stop();
    this.stopPolling();
    await this.runPromise?.catch(() => undefined);
  }

  render(): string {
    return renderDashboard(this.state);
  }

  async refreshSnapshot(): Promise<void> {
    const snap = await this.api.status();
    this.state = applySnapshot(this.state, snap);
    this.emit();
  }

  private emit(): void {
    this.options.onChange?.(this.state);
  }

  private onFrame(frame: SseFrame): void {
    if (frame.event && frame.event !== "transition") return;
    let transition: Transition;
    try {
      transition = JSON.parse(frame.data ?? "") as Transition;
    } catch {
      return;
    }
    this.state = applyTransition(this.state, transition);
    this.emit();
  }

  private onStreamState(streamState: StreamState): void {
    this.state = { ...this.state, connection: streamState };
    if (streamState === "open" || streamState === "stopped") this.stopPolling();
    else this.startPolling();
    this.emit();
  }

  private startPolling(): void {
    if (this.pollTimer) return;
    const interval = this.options.pollIntervalMs ?? 2000;
    this.pollTimer = setInterval(() => {
      void this.refreshSnapshot().catch(() => undefined);
    }, interval);
  }

  private stopPolling(): void {
    if (this.pollTimer) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }
}
