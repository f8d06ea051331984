import { ApiClient, ApiError } from "./api.js";
import {
  renderBarChart,
  renderLineChart,
  renderScheduleGrid,
  renderSummaryBadges,
} from "./charts.js";
import { ScheduleView } from "./model.js";
import type { EditField, EditOp, ExampleEntry } from "./types.js";

function apiBaseUrl(): string {
  if (typeof location === "undefined") return "";
  return new URLSearchParams(location.search).get("api") ?? "";
}

const api = new ApiClient(apiBaseUrl());
const view = new ScheduleView();
let examples: ExampleEntry[] = [];
let lastEditedRange: [number, number] | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function banner(message: string | null): void {
  const box = el<HTMLDivElement>("banner");
  box.textContent = message ?? "";
  box.style.display = message ? "block" : "none";
}

function renderGrid(): void {
  if (view.base === null) return;
  el<HTMLDivElement>("schedule").innerHTML = renderScheduleGrid({
    servers: view.serversPreview(),
    loads: view.loadOverlay(),
    editedRange: lastEditedRange,
  });
  el<HTMLDivElement>("edit-list").textContent = view.edits.length
    ? view.edits
        .map(
          (e, i) =>
            `#${i}: ${e.op} ${e.field} ${e.value} on ${e.period_range[0]}..${e.period_range[1]}`,
        )
        .join("  |  ")
    : "no pending edits";
}

function renderCharts(): void {
  const target = el<HTMLDivElement>("charts");
  if (view.result === null) {
    target.innerHTML = "<p>No solve yet.</p>";
    el<HTMLDivElement>("badges").innerHTML = "";
    return;
  }
  const { timeline, summary } = view.result;
  const stale = view.stale;
  const detected = timeline.outcome.map((o) => o !== "full-sum");
  target.innerHTML = [
    renderLineChart({ title: "service level", values: timeline.SL, stale }),
    renderLineChart({ title: "expected in system", values: timeline.ES, color: "#7c3aed", stale }),
    renderLineChart({ title: "tail probability", values: timeline.p_tail, color: "#dc2626", stale }),
    renderLineChart({ title: "error bound", values: timeline.eps_accum, color: "#059669", stale }),
    renderBarChart({ title: "iterations per step", values: timeline.iterations, highlight: detected, stale }),
  ].join("");
  el<HTMLDivElement>("badges").innerHTML = renderSummaryBadges(summary);
}

async function loadExample(name: string): Promise<void> {
  const entry = examples.find((e) => e.name === name);
  if (!entry) {
    banner(`unknown example: ${name}`);
    return;
  }
  banner(null);
  lastEditedRange = null;
  view.loadScenario(entry.scenario);
  renderGrid();
  renderCharts();
  await solveNow();
}

async function solveNow(): Promise<void> {
  if (view.base === null) return;
  const request = view.request();
  const solved = view.editedScenario();
  const ticket = view.beginSolve();
  renderCharts();
  try {
    const response = await api.whatIf(request);
    if (view.completeSolve(ticket, response, solved)) {
      banner(null);
      renderGrid();
      renderCharts();
    }
  } catch (err) {
    if (!view.failSolve(ticket)) return;
    if (err instanceof ApiError) {
      banner(`solve rejected (${err.status}): ${err.message}`);
    } else {
      banner(`service unreachable: ${String(err)}`);
    }
  }
}

function queueEditFromForm(): void {
  try {
    const first = Number(el<HTMLInputElement>("edit-from").value);
    const last = Number(el<HTMLInputElement>("edit-to").value);
    const field = el<HTMLSelectElement>("edit-field").value as EditField;
    const op = el<HTMLSelectElement>("edit-op").value as EditOp;
    const value = Number(el<HTMLInputElement>("edit-value").value);
    view.addEdit({ period_range: [first, last], field, op, value });
    lastEditedRange = [first, last];
    banner(null);
    renderGrid();
    renderCharts();
  } catch (err) {
    banner(String(err instanceof Error ? err.message : err));
  }
}

export async function start(): Promise<void> {
  try {
    examples = await api.getExamples();
  } catch (err) {
    banner(`cannot reach the solver service: ${String(err)}`);
    return;
  }
  const select = el<HTMLSelectElement>("example");
  select.innerHTML = examples
    .map((e) => `<option value="${e.name}">${e.name}</option>`)
    .join("");
  select.addEventListener("change", () => void loadExample(select.value));
  el<HTMLButtonElement>("add-edit").addEventListener("click", queueEditFromForm);
  el<HTMLButtonElement>("clear-edits").addEventListener("click", () => {
    view.clearEdits();
    lastEditedRange = null;
    renderGrid();
    renderCharts();
  });
  el<HTMLButtonElement>("solve").addEventListener("click", () => void solveNow());
  el<HTMLInputElement>("sl-wait").addEventListener("change", (ev) => {
    view.slWaitS = Number((ev.target as HTMLInputElement).value);
  });
  await loadExample(examples[0]?.name ?? "");
}

if (typeof document !== "undefined") {
  void start();
}
