/**
 * Assembly session UI. One page: status line, placement strip, profile
 * chart, candidate table with LEFT/RIGHT commit buttons, undo.
 *
 * All state lives on the server; this code renders the latest SessionView
 * and turns clicks into API calls. On a 409 the view is refetched rather
 * than retried, since the decision may no longer make sense.
 */

import { SessionApi, StaleRevisionError, ApiError } from "./api.js";
import type { SessionView } from "./api.js";
import { renderChart } from "./chart.js";
import { candidateRows, canUndo, findCandidate, statusLine, stripIds } from "./model.js";

export class AppController {
  private view: SessionView | null = null;
  private selectedId: string | null = null;
  /** Last in-flight mutation; tests await this. */
  pending: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: SessionApi,
  ) {}

  current(): SessionView {
    if (!this.view) throw new Error("no view loaded yet");
    return this.view;
  }

  async load(): Promise<void> {
    try {
      this.show(await this.api.state());
    } catch (err) {
      this.showError(err);
    }
  }

  async commit(sherdId: string, side: "LEFT" | "RIGHT", override: boolean): Promise<void> {
    const revision = this.current().revision;
    try {
      this.show(await this.api.decide({ sherd_id: sherdId, side, override }, revision));
    } catch (err) {
      await this.recover(err);
    }
  }

  async undoLast(): Promise<void> {
    const revision = this.current().revision;
    try {
      this.show(await this.api.undo(revision));
    } catch (err) {
      await this.recover(err);
    }
  }

  select(sherdId: string): void {
    this.selectedId = sherdId;
    if (this.view) this.render();
  }

  /** Stale revision: somebody else moved. Refetch, tell the user, go on. */
  private async recover(err: unknown): Promise<void> {
    if (err instanceof StaleRevisionError) {
      this.show(await this.api.state());
      this.notice("Session changed elsewhere; showing the latest state.");
      return;
    }
    this.showError(err);
  }

  private show(view: SessionView): void {
    this.view = view;
    if (this.selectedId && !findCandidate(view, this.selectedId)) {
      this.selectedId = null;
    }
    if (!this.selectedId) {
      this.selectedId = view.candidates.find((c) => c.accepted)?.sherd_id ?? null;
    }
    this.render();
  }

  private notice(text: string): void {
    const el = this.root.querySelector("#notice") as HTMLElement;
    el.textContent = text;
    el.hidden = text === "";
  }

  private showError(err: unknown): void {
    const text = err instanceof ApiError ? `${err.message} (${err.status})` : String(err);
    this.notice(text);
  }

  private render(): void {
    const view = this.current();
    this.notice("");

    (this.root.querySelector("#status") as HTMLElement).textContent = statusLine(view);

    const strip = this.root.querySelector("#strip") as HTMLElement;
    strip.replaceChildren(
      ...stripIds(view).map((sid) => {
        const chip = strip.ownerDocument.createElement("span");
        chip.className = "chip";
        chip.textContent = sid;
        return chip;
      }),
    );

    const undoBtn = this.root.querySelector("#undo-btn") as HTMLButtonElement;
    undoBtn.disabled = !canUndo(view);

    const chartHost = this.root.querySelector("#chart") as HTMLElement;
    const selected = this.selectedId ? findCandidate(view, this.selectedId) : null;
    chartHost.replaceChildren(renderChart(chartHost.ownerDocument, view, selected));

    this.renderCandidates(view);
  }

  private renderCandidates(view: SessionView): void {
    const tbody = this.root.querySelector("#candidates") as HTMLElement;
    const doc = tbody.ownerDocument;
    const rows = candidateRows(view);
    tbody.replaceChildren(
      ...rows.map((row) => {
        const tr = doc.createElement("tr");
        tr.dataset.sherd = row.sherdId;
        if (row.sherdId === this.selectedId) tr.className = "selected";
        tr.addEventListener("click", () => this.select(row.sherdId));

        for (const text of [row.sherdId, row.offsetText, row.overlapText, row.scoreText]) {
          const td = doc.createElement("td");
          td.textContent = text;
          tr.appendChild(td);
        }

        const flag = doc.createElement("td");
        flag.textContent = row.matchable ? (row.accepted ? "ok" : "rejected") : "too short";
        tr.appendChild(flag);

        const actions = doc.createElement("td");
        if (row.matchable) {
          for (const side of ["LEFT", "RIGHT"] as const) {
            const btn = doc.createElement("button");
            btn.textContent = side;
            btn.dataset.side = side;
            btn.addEventListener("click", (ev) => {
              ev.stopPropagation();
              this.pending = this.commit(row.sherdId, side, row.needsOverride);
            });
            actions.appendChild(btn);
          }
          if (row.needsOverride) {
            const mark = doc.createElement("span");
            mark.className = "override-mark";
            mark.textContent = "override";
            actions.appendChild(mark);
          }
        }
        tr.appendChild(actions);
        return tr;
      }),
    );
  }
}

export function mountApp(root: HTMLElement, api: SessionApi): AppController {
  root.innerHTML = `
    <header>
      <h1>sherd assembly</h1>
      <p id="status"></p>
      <p id="notice" hidden></p>
    </header>
    <section>
      <h2>placement strip</h2>
      <div id="strip"></div>
      <button id="undo-btn" disabled>undo last decision</button>
    </section>
    <section>
      <h2>profiles</h2>
      <div id="chart"></div>
    </section>
    <section>
      <h2>candidates</h2>
      <table>
        <thead>
          <tr><th>sherd</th><th>offset</th><th>overlap</th><th>score</th><th></th><th></th></tr>
        </thead>
        <tbody id="candidates"></tbody>
      </table>
    </section>
  `;
  const controller = new AppController(root, api);
  (root.querySelector("#undo-btn") as HTMLButtonElement).addEventListener("click", () => {
    controller.pending = controller.undoLast();
  });
  return controller;
}

declare global {
  interface Window {
    __sherdkitBooted?: boolean;
  }
}

// Browser entry point; tests import mountApp and drive it themselves.
if (typeof document !== "undefined" && document.getElementById("app") && !window.__sherdkitBooted) {
  window.__sherdkitBooted = true;
  const controller = mountApp(document.getElementById("app") as HTMLElement, new SessionApi());
  controller.pending = controller.load();
}
