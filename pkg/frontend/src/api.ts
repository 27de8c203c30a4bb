/**
 * Typed client for the assembly session API.
 *
 * The service uses optimistic concurrency: every view carries a revision,
 * and mutating requests must send back the revision they were computed
 * from in an If-Match header. A 409 means someone else (another tab, the
 * terminal) moved first; the only correct reaction is to refetch the state
 * and let the user decide again, which StaleRevisionError signals.
 */

export interface MatchView {
  offset: number;
  overlap: number;
  sad: number;
  score: number;
  reversed: boolean;
}

export interface OverlayView {
  start_mm: number;
  samples_mm: number[];
}

export interface CandidateView {
  sherd_id: string;
  match: MatchView | null;
  accepted: boolean;
  overlay: OverlayView | null;
}

export interface PlacementView {
  sherd_id: string;
  offset: number;
  offset_mm: number;
  side: "LEFT" | "RIGHT" | "UNDECIDED";
  score: number;
  decided_by: string;
}

export interface MetaView {
  step_mm: number;
  samples_mm: number[];
  provenance: number[];
}

export interface SessionView {
  revision: number;
  complete: boolean;
  log_length: number;
  config: Record<string, unknown>;
  meta: MetaView;
  placements: PlacementView[];
  strip: string[];
  candidates: CandidateView[];
  pool: string[];
}

export interface DecisionRequest {
  sherd_id: string;
  side: "LEFT" | "RIGHT";
  override: boolean;
}

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** The server rejected our revision; refetch state before retrying. */
export class StaleRevisionError extends ApiError {
  constructor(message: string, status: number, public readonly serverRevision: number | null) {
    super(message, status);
    this.name = "StaleRevisionError";
  }
}

type FetchLike = typeof fetch;

export class SessionApi {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  async state(): Promise<SessionView> {
    const resp = await this.fetchImpl(this.base + "/api/state");
    return this.unwrap(resp);
  }

  async decide(request: DecisionRequest, revision: number): Promise<SessionView> {
    const resp = await this.fetchImpl(this.base + "/api/decision", {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "If-Match": `"${revision}"`,
      },
      body: JSON.stringify(request),
    });
    return this.unwrap(resp);
  }

  async undo(revision: number): Promise<SessionView> {
    const resp = await this.fetchImpl(this.base + "/api/undo", {
      method: "POST",
      headers: { "If-Match": `"${revision}"` },
    });
    return this.unwrap(resp);
  }

  private async unwrap(resp: Response): Promise<SessionView> {
    if (resp.ok) {
      return (await resp.json()) as SessionView;
    }
    let message = `request failed (${resp.status})`;
    let serverRevision: number | null = null;
    try {
      const body = (await resp.json()) as { error?: string; revision?: number };
      if (body.error) message = body.error;
      if (typeof body.revision === "number") serverRevision = body.revision;
    } catch {
      // non-JSON error body; keep the generic message
    }
    if (resp.status === 409 && message.includes("stale")) {
      throw new StaleRevisionError(message, resp.status, serverRevision);
    }
    throw new ApiError(message, resp.status);
  }
}
