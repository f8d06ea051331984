import type {
  ExampleEntry,
  ScenarioDocument,
  SolveResponse,
  WhatIfRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let message = `HTTP ${response.status}`;
    try {
      const body = await response.json();
      if (body && typeof body.error === "string") message = body.error;
    } catch {
      /* fall through with the status-only message */
    }
    throw new ApiError(response.status, message);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  async getExamples(): Promise<ExampleEntry[]> {
    const response = await fetch(`${this.baseUrl}/api/examples`);
    const payload = await parseOrThrow<{ examples: ExampleEntry[] }>(response);
    return payload.examples;
  }

  async solve(scenario: ScenarioDocument, slWaitS?: number): Promise<SolveResponse> {
    const body: Record<string, unknown> = { ...scenario };
    if (slWaitS !== undefined) body.metrics = { sl_d: slWaitS };
    const response = await fetch(`${this.baseUrl}/api/solve`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return parseOrThrow<SolveResponse>(response);
  }

  async whatIf(request: WhatIfRequest): Promise<SolveResponse> {
    const response = await fetch(`${this.baseUrl}/api/whatif`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    return parseOrThrow<SolveResponse>(response);
  }
}
