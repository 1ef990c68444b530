// API wire types, matching the service's JSON bodies.

export type Mode = 'ni' | 'eq';
export type Path = 'distinct' | 'shared';

export interface PlanRequest {
  mode: string;
  path?: string;
  eta?: number;
  eta_theta?: number;
  eta_delta?: number;
  alpha?: number;
  beta?: number;
  dropout?: number;
  n?: number;
}

export interface PlanResponse {
  n: number;
  achieved_power: number;
  n_inflated?: number;
  inputs: Record<string, unknown>;
  version: string;
}

export interface ApiError {
  error: string;
  detail: string;
}

export interface TrialRecord {
  id: string;
  stage1: string;
  response: number;
  stage2: string;
  outcome: number;
}

export interface AnalyzeRequest {
  records: TrialRecord[];
  mode: Mode;
  control: string;
  new: string;
  theta: number;
  alpha?: number;
}

export interface TestReportBody {
  kind: string;
  control: string;
  new: string;
  path: string;
  n: number;
  mean_first: number;
  mean_second: number;
  theta: number;
  alpha: number;
  z_ni: number;
  p_ni: number;
  z_ns: number | null;
  p_ns: number | null;
  bf_bound_ni: number;
  bf_bound_ns: number | null;
  decision: string;
}

export interface AnalyzeResponse {
  report: TestReportBody;
  inputs: Record<string, unknown>;
  version: string;
}

export interface PresetInfo {
  name: string;
  rows: number;
  mode: Mode;
  control: string;
  new: string;
  description: string;
}

export interface PresetsResponse {
  presets: PresetInfo[];
  version: string;
}

export interface SimulateResponse {
  estimate: number;
  se: number;
  reps: number;
  n: number;
  seed: number;
  inputs: Record<string, unknown>;
  version: string;
}
