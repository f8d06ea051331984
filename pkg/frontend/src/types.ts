export interface PeriodEntry {
  dur_s: number;
  lambda_per_s: number;
  mu_per_s: number;
  servers: number;
}

export interface ScenarioDocument {
  horizon_s: number;
  capacity_n: number;
  eps_total: number;
  eps_step: number;
  delta_T: number;
  eps_ssd_factor: number;
  output_dt_s: number;
  precision: "binary32" | "binary64";
  periods: PeriodEntry[];
  initial: "empty" | number[];
}

export type EditField = "servers" | "lambda_per_s" | "mu_per_s";
export type EditOp = "set" | "add";

export interface WhatIfEdit {
  period_range: [number, number];
  field: EditField;
  op: EditOp;
  value: number;
}

export interface WhatIfRequest {
  base: ScenarioDocument;
  edits: WhatIfEdit[];
  metrics?: { sl_d: number };
}

export interface TimelineArrays {
  t: number[];
  ES: number[];
  SL: number[];
  p_tail: number[];
  eps_accum: number[];
  iterations: number[];
  outcome: string[];
}

export interface SolveSummary {
  total_mvm: number;
  max_eps_accum: number;
  delta: number;
  max_p_tail: number;
  capacity_flag: boolean;
  ssd_steps: number;
  sl_wait_s: number;
}

export interface SolveResponse {
  timeline: TimelineArrays;
  summary: SolveSummary;
}

export interface ExampleEntry {
  name: string;
  scenario: ScenarioDocument;
}
