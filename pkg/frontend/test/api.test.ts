import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { ScenarioDocument } from "../src/types.js";

import examplesFixture from "./fixtures/examples.json";
import solveFixture from "./fixtures/solve-converging-210.json";

const scenario = examplesFixture.examples[0]!.scenario as ScenarioDocument;

function mockFetch(status: number, body: unknown) {
  const mock = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  }));
  vi.stubGlobal("fetch", mock);
  return mock;
}

afterEach(() => vi.unstubAllGlobals());

describe("ApiClient", () => {
  it("fetches the example catalog", async () => {
    const mock = mockFetch(200, examplesFixture);
    const examples = await new ApiClient("http://svc").getExamples();
    expect(mock).toHaveBeenCalledWith("http://svc/api/examples");
    expect(examples.map((e) => e.name)).toContain("converging-210");
  });

  it("posts the scenario document for a solve", async () => {
    const mock = mockFetch(200, solveFixture);
    const response = await new ApiClient().solve(scenario, 30);
    expect(response.timeline.t).toHaveLength(288);
    const [url, init] = mock.mock.calls[0]! as unknown as [string, RequestInit];
    expect(url).toBe("/api/solve");
    expect(init.method).toBe("POST");
    const body = JSON.parse(init.body as string);
    expect(body.capacity_n).toBe(scenario.capacity_n);
    expect(body.metrics).toEqual({ sl_d: 30 });
  });

  it("posts base and edits for a what-if", async () => {
    const mock = mockFetch(200, solveFixture);
    const edits = [
      { period_range: [150, 170] as [number, number], field: "servers" as const,
        op: "add" as const, value: 2 },
    ];
    await new ApiClient().whatIf({ base: scenario, edits });
    const [url, init] = mock.mock.calls[0]! as unknown as [string, RequestInit];
    expect(url).toBe("/api/whatif");
    const body = JSON.parse(init.body as string);
    expect(body.base.periods).toHaveLength(288);
    expect(body.edits).toEqual(edits);
  });

  it("maps service rejections to ApiError with the server message", async () => {
    mockFetch(400, { error: "periods[3].servers: must be in [1, capacity_n=210]" });
    const call = new ApiClient().solve(scenario);
    await expect(call).rejects.toBeInstanceOf(ApiError);
    await expect(call).rejects.toMatchObject({
      status: 400,
      message: expect.stringContaining("periods[3].servers"),
    });
  });

  it("falls back to the status code when the body is not JSON", async () => {
    const mock = vi.fn(async () => ({
      ok: false,
      status: 504,
      json: async () => {
        throw new Error("empty");
      },
    }));
    vi.stubGlobal("fetch", mock);
    await expect(new ApiClient().solve(scenario)).rejects.toMatchObject({
      status: 504,
      message: "HTTP 504",
    });
  });
});
