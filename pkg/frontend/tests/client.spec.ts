import { describe, expect, test } from "vitest";

import { SessionClient, ServiceError, type FetchLike } from "../src/client.js";
import type { FrameDocument } from "../src/types.js";
import { StubService, fixture } from "./stub-service.js";

const FRAME = fixture<FrameDocument>("frame_initial");
const SESSION = { session_id: "s1", widgets: [], cycle_ms: 5500 };

interface Pending {
  url: string;
  body: Record<string, unknown> | undefined;
  resolve(payload: unknown): void;
}

/** fetch whose responses are released manually, to observe in-flight counts. */
function manualFetch() {
  const pending: Pending[] = [];
  const fetchImpl: FetchLike = (url, init) =>
    new Promise((resolve) => {
      if (url.endsWith("/sessions") && init?.method === "POST") {
        resolve({ status: 200, json: async () => SESSION });
        return;
      }
      pending.push({
        url,
        body: init?.body ? JSON.parse(init.body) : undefined,
        resolve: (payload) => resolve({ status: 200, json: async () => payload }),
      });
    });
  return { pending, fetchImpl };
}

async function settle(): Promise<void> {
  for (let i = 0; i < 10; i++) await Promise.resolve();
}

describe("SessionClient", () => {
  test("create exposes widgets and cycle length", async () => {
    const stub = new StubService();
    const spec = fixture("gapminder_spec");
    const client = await SessionClient.create("http://x", spec, undefined, stub.fetch);
    expect(client.cycleMs).toBe(5500);
    expect(client.widgets.map((w) => w.kind)).toEqual([
      "range-slider",
      "checkbox",
    ]);
  });

  test("create rejects with service diagnostics", async () => {
    const stub = new StubService();
    await expect(
      SessionClient.create("http://x", {}, undefined, stub.fetch),
    ).rejects.toBeInstanceOf(ServiceError);
  });

  test("at most one event request is in flight", async () => {
    const { pending, fetchImpl } = manualFetch();
    const client = await SessionClient.create("http://x", {}, undefined, fetchImpl);
    const a = client.sendEvent({ type: "timer", dt: 0 });
    const b = client.sendEvent({ type: "timer", dt: 0 });
    const c = client.advance(16);
    await settle();
    expect(pending.length).toBe(1);
    pending[0]!.resolve({ frame: FRAME, seq: pending[0]!.body!.seq });
    await settle();
    expect(pending.length).toBe(2);
    pending[1]!.resolve({ frame: FRAME, seq: pending[1]!.body!.seq });
    await settle();
    expect(pending.length).toBe(3);
    pending[2]!.resolve({ frame: FRAME, seq: pending[2]!.body!.seq });
    await Promise.all([a, b, c]);
  });

  test("requests carry increasing sequence numbers in send order", async () => {
    const { pending, fetchImpl } = manualFetch();
    const client = await SessionClient.create("http://x", {}, undefined, fetchImpl);
    const done = [
      client.sendEvent({ type: "widget_set", widget: "w", value: 1 }),
      client.advance(16),
      client.sendEvent({ type: "widget_set", widget: "w", value: 2 }),
    ];
    const seqs: number[] = [];
    for (let i = 0; i < 3; i++) {
      await settle();
      const req = pending[i]!;
      seqs.push(req.body!.seq as number);
      req.resolve({ frame: FRAME, seq: req.body!.seq });
    }
    await Promise.all(done);
    expect(seqs).toEqual([1, 2, 3]);
    expect(client.lastSeq).toBe(3);
  });

  test("a sequence mismatch from the service rejects", async () => {
    const { pending, fetchImpl } = manualFetch();
    const client = await SessionClient.create("http://x", {}, undefined, fetchImpl);
    const p = client.sendEvent({ type: "timer", dt: 0 });
    await settle();
    pending[0]!.resolve({ frame: FRAME, seq: 999 });
    await expect(p).rejects.toThrow(/sequence mismatch/);
  });

  test("a failed request does not wedge the queue", async () => {
    const stub = new StubService();
    const spec = fixture("gapminder_spec");
    const client = await SessionClient.create("http://x", spec, undefined, stub.fetch);
    await expect(
      client.sendEvent({ type: "widget_set", widget: "bogus", value: 1 }),
    ).rejects.toBeInstanceOf(ServiceError);
    const frame = await client.getFrame();
    expect(frame.items.length).toBeGreaterThan(0);
  });

  test("latestFrame tracks the newest response", async () => {
    const stub = new StubService();
    const spec = fixture("gapminder_spec");
    const client = await SessionClient.create("http://x", spec, undefined, stub.fetch);
    expect(client.latestFrame).toBeNull();
    const frame = await client.getFrame();
    expect(client.latestFrame).toBe(frame);
  });

  test("close deletes the session", async () => {
    const stub = new StubService();
    const spec = fixture("gapminder_spec");
    const client = await SessionClient.create("http://x", spec, undefined, stub.fetch);
    await client.close();
    await expect(client.getFrame()).rejects.toBeInstanceOf(ServiceError);
    expect(stub.requests.at(-2)?.method).toBe("DELETE");
  });
});
