/**
 * Pure presentation logic, kept out of the DOM so it can be tested flat.
 *
 * Numbers from the service are displayed verbatim: String(x) and nothing
 * else. The engine's scores are the evidence a person weighs before
 * committing a sherd, and rounding them here would misrepresent ties.
 */

import type { CandidateView, SessionView } from "./api.js";

export interface CandidateRow {
  sherdId: string;
  offsetText: string;
  overlapText: string;
  scoreText: string;
  accepted: boolean;
  matchable: boolean;
  needsOverride: boolean;
}

/** Verbatim numeric text; null-safe for unmatched candidates. */
export function verbatim(x: number | null | undefined): string {
  return x === null || x === undefined ? "-" : String(x);
}

export function canUndo(view: SessionView): boolean {
  return view.log_length > 0;
}

/**
 * One table row per candidate, in the service's ranking order.
 *
 * A candidate without a match can never be committed (the piece is too
 * short to overlap enough). A listed but not accepted one commits only
 * with override, and the row says so.
 */
export function candidateRows(view: SessionView): CandidateRow[] {
  const top = view.candidates.find((c) => c.accepted);
  return view.candidates.map((c) => ({
    sherdId: c.sherd_id,
    offsetText: c.match ? verbatim(c.match.offset) : "-",
    overlapText: c.match ? verbatim(c.match.overlap) : "-",
    scoreText: c.match ? verbatim(c.match.score) : "-",
    accepted: c.accepted,
    matchable: c.match !== null,
    needsOverride: c.match !== null && (!c.accepted || c.sherd_id !== top?.sherd_id),
  }));
}

/** Placement strip left to right, as the service orders it. */
export function stripIds(view: SessionView): string[] {
  return view.strip.slice();
}

export function statusLine(view: SessionView): string {
  if (view.complete) {
    return `complete: ${view.strip.length} sherds placed (revision ${view.revision})`;
  }
  return `${view.strip.length} placed, ${view.pool.length} in pool (revision ${view.revision})`;
}

export function findCandidate(view: SessionView, sherdId: string): CandidateView | null {
  return view.candidates.find((c) => c.sherd_id === sherdId) ?? null;
}
