import type { FrameDocument, SessionEvent, SessionInfo } from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ServiceError extends Error {
  constructor(
    message: string,
    public status: number,
    public detail: unknown,
  ) {
    super(message);
  }
}

async function request(
  fetchImpl: FetchLike,
  url: string,
  method: string,
  body?: unknown,
): Promise<unknown> {
  const res = await fetchImpl(url, {
    method,
    headers: { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await res.json();
  if (res.status >= 400) {
    const detail = (payload as { detail?: unknown; error?: unknown }) ?? {};
    throw new ServiceError(
      `service returned ${res.status}`,
      res.status,
      detail.detail ?? detail.error ?? payload,
    );
  }
  return payload;
}

/**
 * One session against the service.  Gesture and advance requests share a
 * FIFO queue so at most one is in flight and ordering is preserved; each
 * carries a client sequence number the service echoes back.
 */
export class SessionClient {
  latestFrame: FrameDocument | null = null;

  private seq = 0;
  private queue: Promise<unknown> = Promise.resolve();

  private constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike,
    public readonly sessionId: string,
    public readonly widgets: SessionInfo["widgets"],
    public readonly cycleMs: number,
  ) {}

  static async create(
    baseUrl: string,
    spec: unknown,
    data?: unknown,
    fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ): Promise<SessionClient> {
    const body: Record<string, unknown> = { spec };
    if (data !== undefined) body.data = data;
    const info = (await request(
      fetchImpl,
      `${baseUrl}/sessions`,
      "POST",
      body,
    )) as SessionInfo;
    return new SessionClient(
      baseUrl,
      fetchImpl,
      info.session_id,
      info.widgets,
      info.cycle_ms,
    );
  }

  /** Number of requests accepted so far; next request carries this + 1. */
  get lastSeq(): number {
    return this.seq;
  }

  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.queue.then(task, task);
    this.queue = next.catch(() => undefined);
    return next;
  }

  sendEvent(event: SessionEvent): Promise<FrameDocument> {
    const seq = ++this.seq;
    return this.enqueue(async () => {
      const out = (await request(
        this.fetchImpl,
        `${this.baseUrl}/sessions/${this.sessionId}/events`,
        "POST",
        { event, seq },
      )) as { frame: FrameDocument; seq?: number };
      if (out.seq !== undefined && out.seq !== seq) {
        throw new ServiceError(
          `sequence mismatch: sent ${seq}, got ${out.seq}`,
          500,
          out,
        );
      }
      this.latestFrame = out.frame;
      return out.frame;
    });
  }

  advance(dtMs: number): Promise<FrameDocument> {
    const seq = ++this.seq;
    return this.enqueue(async () => {
      const out = (await request(
        this.fetchImpl,
        `${this.baseUrl}/sessions/${this.sessionId}/advance`,
        "POST",
        { dt_ms: dtMs, seq },
      )) as { frame: FrameDocument; seq?: number };
      if (out.seq !== undefined && out.seq !== seq) {
        throw new ServiceError(
          `sequence mismatch: sent ${seq}, got ${out.seq}`,
          500,
          out,
        );
      }
      this.latestFrame = out.frame;
      return out.frame;
    });
  }

  getFrame(): Promise<FrameDocument> {
    return this.enqueue(async () => {
      const out = (await request(
        this.fetchImpl,
        `${this.baseUrl}/sessions/${this.sessionId}/frame`,
        "GET",
      )) as { frame: FrameDocument };
      this.latestFrame = out.frame;
      return out.frame;
    });
  }

  close(): Promise<void> {
    return this.enqueue(async () => {
      await request(
        this.fetchImpl,
        `${this.baseUrl}/sessions/${this.sessionId}`,
        "DELETE",
      );
    });
  }
}
