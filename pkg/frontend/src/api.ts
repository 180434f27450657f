import type { OpenResult, ParticipantListing, StatusSnapshot } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

// `fetch` must not be extracted from its global, so wrap instead of aliasing.
const defaultFetch: FetchLike = (input, init) => fetch(input, init);

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function decode(res: Response): Promise<unknown> {
  const text = await res.text();
  if (!text) return null;
  try {
    return JSON.parse(text);
  } catch {
    return null;
  }
}

async function expectOk<T>(res: Response): Promise<T> {
  const data = await decode(res);
  if (!res.ok) {
    const detail =
      data && typeof data === "object" && typeof (data as { detail?: unknown }).detail === "string"
        ? (data as { detail: string }).detail
        : `request failed with status ${res.status}`;
    throw new ApiError(res.status, detail);
  }
  return data as T;
}

/** Client for the unauthenticated participant endpoints, and nothing else. */
export class ParticipantApi {
  /** Relative path of every request issued, oldest first. */
  readonly requestLog: string[] = [];

  constructor(
    private readonly baseUrl = "",
    private readonly fetchImpl: FetchLike = defaultFetch,
  ) {}

  private request(path: string, init?: RequestInit): Promise<Response> {
    this.requestLog.push(path);
    return this.fetchImpl(this.baseUrl + path, init);
  }

  async listFiles(env?: number): Promise<ParticipantListing> {
    const query = env === undefined ? "" : `?env=${env}`;
    return expectOk(await this.request(`/api/participant/files${query}`));
  }

  async open(name: string, idempotencyKey?: string): Promise<OpenResult> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (idempotencyKey) headers["idempotency-key"] = idempotencyKey;
    return expectOk(
      await this.request("/api/participant/open", {
        method: "POST",
        headers,
        body: JSON.stringify({ name }),
      }),
    );
  }
}

export class OperatorApi {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = defaultFetch,
  ) {}

  get headers(): Record<string, string> {
    return { "x-operator-token": this.token };
  }

  streamUrl(since?: number): string {
    const query = since ? `?since=${since}` : "";
    return `${this.baseUrl}/api/operator/stream${query}`;
  }

  async status(): Promise<StatusSnapshot> {
    return expectOk(
      await this.fetchImpl(`${this.baseUrl}/api/operator/status`, { headers: this.headers }),
    );
  }
}
