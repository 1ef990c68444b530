// Thin typed client for the planning service.  All statistics arrive from
// the API; nothing numerical is computed on this side.

import type {
  AnalyzeRequest,
  AnalyzeResponse,
  ApiError,
  PlanRequest,
  PlanResponse,
  PresetsResponse,
  SimulateResponse,
} from './types.js';

export class ApiRejection extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError,
  ) {
    super(`${body.error}: ${body.detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
      signal,
    });
    const data = await resp.json();
    if (!resp.ok) throw new ApiRejection(resp.status, data as ApiError);
    return data as T;
  }

  plan(body: PlanRequest, signal?: AbortSignal): Promise<PlanResponse> {
    return this.post('/api/plan', body, signal);
  }

  analyze(body: AnalyzeRequest, signal?: AbortSignal): Promise<AnalyzeResponse> {
    return this.post('/api/analyze', body, signal);
  }

  simulate(body: Record<string, unknown>, signal?: AbortSignal): Promise<SimulateResponse> {
    return this.post('/api/simulate', body, signal);
  }

  async presets(signal?: AbortSignal): Promise<PresetsResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/presets`, { signal });
    const data = await resp.json();
    if (!resp.ok) throw new ApiRejection(resp.status, data as ApiError);
    return data as PresetsResponse;
  }
}
