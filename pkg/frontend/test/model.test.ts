import { describe, expect, it } from "vitest";

import { ScheduleView } from "../src/model.js";
import type { ScenarioDocument, SolveResponse } from "../src/types.js";

import solveFixture from "./fixtures/solve-converging-210.json";
import examplesFixture from "./fixtures/examples.json";

const scenario = examplesFixture.examples.find(
  (e) => e.name === "converging-210",
)!.scenario as ScenarioDocument;

function freshView(): ScheduleView {
  const view = new ScheduleView();
  view.loadScenario(scenario);
  return view;
}

describe("ScheduleView", () => {
  it("starts clean after loading a scenario", () => {
    const view = freshView();
    expect(view.edits).toEqual([]);
    expect(view.result).toBeNull();
    expect(view.stale).toBe(false);
    expect(view.serversPreview()).toHaveLength(288);
    expect(view.serversPreview().every((s) => s === 30)).toBe(true);
  });

  it("previews pending edits on the grid and flags staleness", () => {
    const view = freshView();
    view.addEdit({ period_range: [10, 12], field: "servers", op: "add", value: 2 });
    expect(view.stale).toBe(true);
    const servers = view.serversPreview();
    expect(servers[9]).toBe(30);
    expect(servers[10]).toBe(32);
    expect(servers[12]).toBe(32);
    expect(servers[13]).toBe(30);
    // The base document is untouched until a solve commits.
    expect(scenario.periods[10]!.servers).toBe(30);
  });

  it("applies set edits and truncates server counts to integers", () => {
    const view = freshView();
    view.addEdit({ period_range: [0, 0], field: "servers", op: "set", value: 33.7 });
    expect(view.serversPreview()[0]).toBe(33);
  });

  it("stacks edits in order", () => {
    const view = freshView();
    view.addEdit({ period_range: [0, 5], field: "servers", op: "set", value: 40 });
    view.addEdit({ period_range: [3, 8], field: "servers", op: "add", value: -1 });
    const servers = view.serversPreview();
    expect(servers.slice(0, 9)).toEqual([40, 40, 40, 39, 39, 39, 29, 29, 29]);
  });

  it("recomputes the load overlay from the previewed schedule", () => {
    const view = freshView();
    const before = view.loadOverlay()[50]!;
    view.addEdit({ period_range: [50, 50], field: "servers", op: "add", value: 30 });
    const after = view.loadOverlay()[50]!;
    expect(after).toBeCloseTo(before / 2, 12);
  });

  it("rejects out-of-range period windows", () => {
    const view = freshView();
    expect(() =>
      view.addEdit({ period_range: [280, 400], field: "servers", op: "add", value: 1 }),
    ).toThrow(/0\.\.287/);
    expect(() =>
      view.addEdit({ period_range: [-1, 4], field: "servers", op: "add", value: 1 }),
    ).toThrow();
    expect(() =>
      view.addEdit({ period_range: [5, 4], field: "servers", op: "add", value: 1 }),
    ).toThrow();
  });

  it("shapes the what-if request with base, edits and metrics", () => {
    const view = freshView();
    view.slWaitS = 45;
    view.addEdit({ period_range: [1, 2], field: "lambda_per_s", op: "set", value: 0.09 });
    const request = view.request();
    expect(request.base).toBe(view.base);
    expect(request.edits).toHaveLength(1);
    expect(request.metrics).toEqual({ sl_d: 45 });
  });

  it("commits a solve: edits clear, curves fresh, schedule adopted", () => {
    const view = freshView();
    view.addEdit({ period_range: [0, 0], field: "servers", op: "add", value: 2 });
    const solved = view.editedScenario();
    const ticket = view.beginSolve();
    expect(view.stale).toBe(true);
    const committed = view.completeSolve(
      ticket, solveFixture as unknown as SolveResponse, solved);
    expect(committed).toBe(true);
    expect(view.stale).toBe(false);
    expect(view.edits).toEqual([]);
    expect(view.base!.periods[0]!.servers).toBe(32);
    expect(view.result).not.toBeNull();
  });

  it("drops responses from superseded solves", () => {
    const view = freshView();
    const stale = view.beginSolve();
    const fresh = view.beginSolve();
    const response = solveFixture as unknown as SolveResponse;
    expect(view.completeSolve(stale, response, view.editedScenario())).toBe(false);
    expect(view.result).toBeNull();
    expect(view.completeSolve(fresh, response, view.editedScenario())).toBe(true);
    expect(view.result).not.toBeNull();
  });

  it("keeps staleness while a solve is in flight", () => {
    const view = freshView();
    const ticket = view.beginSolve();
    expect(view.stale).toBe(true);
    view.failSolve(ticket);
    expect(view.stale).toBe(false);
  });
});
