import type {
  EditField,
  ScenarioDocument,
  SolveResponse,
  WhatIfEdit,
  WhatIfRequest,
} from "./types.js";

/** Schedule the user is looking at, plus the edits they have queued.
 *
 * The grid always renders the schedule WITH pending edits applied, while
 * the charts keep showing the last solved scenario; `stale` tells the view
 * to grey the charts out until the next solve commits.  Solve responses
 * carry a sequence number so a reply belonging to an abandoned request is
 * dropped instead of rendered.
 */
export class ScheduleView {
  base: ScenarioDocument | null = null;
  edits: WhatIfEdit[] = [];
  result: SolveResponse | null = null;
  slWaitS = 20;

  private seq = 0;
  private inFlight = 0;

  loadScenario(scenario: ScenarioDocument): void {
    this.base = scenario;
    this.edits = [];
    this.result = null;
  }

  get stale(): boolean {
    return this.edits.length > 0 || this.inFlight > 0;
  }

  addEdit(edit: WhatIfEdit): void {
    if (this.base === null) throw new Error("no scenario loaded");
    const [first, last] = edit.period_range;
    if (!Number.isInteger(first) || !Number.isInteger(last)) {
      throw new Error("period range must be whole numbers");
    }
    if (first < 0 || last < first || last >= this.base.periods.length) {
      throw new Error(
        `period range must lie in 0..${this.base.periods.length - 1}`,
      );
    }
    this.edits.push(edit);
  }

  clearEdits(): void {
    this.edits = [];
  }

  /** Base schedule with pending edits applied (grid preview only). */
  editedScenario(): ScenarioDocument {
    if (this.base === null) throw new Error("no scenario loaded");
    const periods = this.base.periods.map((p) => ({ ...p }));
    for (const edit of this.edits) {
      const [first, last] = edit.period_range;
      for (let i = first; i <= last; i++) {
        const entry = periods[i]!;
        const current = entry[edit.field];
        let next = edit.op === "set" ? edit.value : current + edit.value;
        if (edit.field === "servers") next = Math.trunc(next);
        entry[edit.field] = next;
      }
    }
    return { ...this.base, periods };
  }

  serversPreview(): number[] {
    return this.editedScenario().periods.map((p) => p.servers);
  }

  /** Offered-load overlay for the previewed schedule. */
  loadOverlay(): number[] {
    return this.editedScenario().periods.map(
      (p) => p.lambda_per_s / (p.servers * p.mu_per_s),
    );
  }

  request(): WhatIfRequest {
    if (this.base === null) throw new Error("no scenario loaded");
    return {
      base: this.base,
      edits: this.edits.slice(),
      metrics: { sl_d: this.slWaitS },
    };
  }

  /** Mark a solve as started; the returned ticket claims the response. */
  beginSolve(): number {
    this.inFlight += 1;
    this.seq += 1;
    return this.seq;
  }

  /** Commit a solve response; false means the ticket was superseded. */
  completeSolve(ticket: number, response: SolveResponse, solved: ScenarioDocument): boolean {
    this.inFlight = Math.max(0, this.inFlight - 1);
    if (ticket !== this.seq) return false;
    this.base = solved;
    this.edits = [];
    this.result = response;
    return true;
  }

  failSolve(ticket: number): boolean {
    this.inFlight = Math.max(0, this.inFlight - 1);
    return ticket === this.seq;
  }
}
