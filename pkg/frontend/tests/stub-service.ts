import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/client.js";
import type { FrameDocument, SessionInfo } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

/**
 * In-memory stand-in for the session service, backed by frame documents
 * pinned from real sessions.  It replays the scripted Gapminder
 * interaction: initial frame, scrub to 1995 (pauses), re-check the
 * play checkbox, advance while playing.
 */
export class StubService {
  requests: RecordedRequest[] = [];

  private session: SessionInfo = fixture<SessionInfo>("session");
  private frames = {
    initial: fixture<FrameDocument>("frame_initial"),
    scrubbed: fixture<FrameDocument>("frame_scrub_1995"),
    resumed: fixture<FrameDocument>("frame_resumed"),
    advanced: fixture<FrameDocument>("frame_after_resume_500"),
  };
  private current: FrameDocument = this.frames.initial;
  private playing = true;
  private deleted = false;

  readonly fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(init.body) : undefined;
    this.requests.push({ method, path, body });
    return this.respond(method, path, body);
  };

  private respond(
    method: string,
    path: string,
    body: Record<string, unknown> | undefined,
  ): { status: number; json(): Promise<unknown> } {
    const reply = (status: number, payload: unknown) => ({
      status,
      json: async () => payload,
    });

    if (method === "POST" && path === "/sessions") {
      if (!body || body.spec === undefined) {
        return reply(400, { detail: "missing: spec" });
      }
      const spec = body.spec as { data?: unknown; mark?: unknown };
      if (!spec || spec.data === undefined || spec.mark === undefined) {
        return reply(400, {
          detail: [
            { severity: "error", path: "$", message: "missing: data, mark" },
          ],
        });
      }
      return reply(200, this.session);
    }

    const m = path.match(/^\/sessions\/([^/]+)(\/(events|advance|frame))?$/);
    if (!m || m[1] !== this.session.session_id || this.deleted) {
      return reply(404, { detail: `unknown session` });
    }

    if (method === "DELETE" && !m[2]) {
      this.deleted = true;
      return reply(200, { deleted: true });
    }

    if (method === "GET" && m[3] === "frame") {
      return reply(200, { frame: this.current });
    }

    if (method === "POST" && m[3] === "events") {
      const event = body?.event as
        | { type: string; widget?: string; value?: unknown }
        | undefined;
      if (!event) return reply(400, { detail: "missing: event" });
      if (event.type === "widget_set") {
        if (event.widget === "current_frame_slider" && event.value === 1995) {
          this.playing = false;
          this.current = this.frames.scrubbed;
        } else if (event.widget === "playpause") {
          this.playing = event.value === true;
          this.current = this.playing ? this.frames.resumed : this.current;
        } else {
          return reply(400, { detail: `unscripted widget ${event.widget}` });
        }
      }
      const out: Record<string, unknown> = { frame: this.current };
      if (body && "seq" in body) out.seq = body.seq;
      return reply(200, out);
    }

    if (method === "POST" && m[3] === "advance") {
      const dt = body?.dt_ms;
      if (typeof dt !== "number" || dt < 0) {
        return reply(400, { detail: "dt_ms must be a number >= 0" });
      }
      if (this.playing && dt > 0) this.current = this.frames.advanced;
      const out: Record<string, unknown> = { frame: this.current };
      if (body && "seq" in body) out.seq = body.seq;
      return reply(200, out);
    }

    return reply(404, { detail: "no route" });
  }
}
