import { describe, expect, it } from "vitest";

import { ApiError, SessionApi, StaleRevisionError } from "../src/api.js";
import { REV0, REV1 } from "./views.js";

interface Recorded {
  url: string;
  init?: RequestInit;
}

function recordingFetch(status: number, body: unknown) {
  const calls: Recorded[] = [];
  const impl = async (input: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(input), init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { calls, impl: impl as typeof fetch };
}

describe("SessionApi", () => {
  it("fetches and parses the state view", async () => {
    const { calls, impl } = recordingFetch(200, REV0);
    const api = new SessionApi("", impl);
    const view = await api.state();
    expect(calls[0].url).toBe("/api/state");
    expect(view).toEqual(REV0);
  });

  it("prefixes a non-empty base URL", async () => {
    const { calls, impl } = recordingFetch(200, REV0);
    await new SessionApi("http://127.0.0.1:7131", impl).state();
    expect(calls[0].url).toBe("http://127.0.0.1:7131/api/state");
  });

  it("sends decisions with the revision in If-Match", async () => {
    const { calls, impl } = recordingFetch(200, REV1);
    const api = new SessionApi("", impl);
    const view = await api.decide(
      { sherd_id: "C15", side: "RIGHT", override: false },
      0,
    );
    expect(view.revision).toBe(1);
    const init = calls[0].init!;
    expect(init.method).toBe("POST");
    const headers = init.headers as Record<string, string>;
    expect(headers["If-Match"]).toBe('"0"');
    expect(headers["Content-Type"]).toBe("application/json");
    expect(JSON.parse(init.body as string)).toEqual({
      sherd_id: "C15",
      side: "RIGHT",
      override: false,
    });
  });

  it("sends undo with If-Match only", async () => {
    const { calls, impl } = recordingFetch(200, REV0);
    await new SessionApi("", impl).undo(2);
    expect(calls[0].url).toBe("/api/undo");
    const headers = calls[0].init!.headers as Record<string, string>;
    expect(headers["If-Match"]).toBe('"2"');
  });

  it("maps a stale 409 to StaleRevisionError with the server revision", async () => {
    const { impl } = recordingFetch(409, {
      error: "stale revision: refetch /api/state and retry",
      revision: 5,
    });
    const api = new SessionApi("", impl);
    const err = await api
      .decide({ sherd_id: "C15", side: "LEFT", override: false }, 0)
      .catch((e) => e);
    expect(err).toBeInstanceOf(StaleRevisionError);
    expect(err.status).toBe(409);
    expect(err.serverRevision).toBe(5);
  });

  it("keeps a nothing-to-undo 409 a plain ApiError", async () => {
    const { impl } = recordingFetch(409, { error: "no decisions to undo", revision: 0 });
    const err = await new SessionApi("", impl).undo(0).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err).not.toBeInstanceOf(StaleRevisionError);
    expect(err.message).toBe("no decisions to undo");
  });

  it("surfaces service error messages with their status", async () => {
    const { impl } = recordingFetch(404, { error: "sherd 'Z9' is not in the pool", revision: 0 });
    const err = await new SessionApi("", impl)
      .decide({ sherd_id: "Z9", side: "LEFT", override: false }, 0)
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.message).toContain("Z9");
  });

  it("tolerates a non-JSON error body", async () => {
    const impl = (async () =>
      new Response("<html>bad gateway</html>", { status: 502 })) as typeof fetch;
    const err = await new SessionApi("", impl).state().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.message).toBe("request failed (502)");
  });
});
