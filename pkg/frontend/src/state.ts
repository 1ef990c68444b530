// Planner state, URL (de)serialization and client-side validation.
//
// Validation is contractually tied to the API: the shared parity table in
// tests/fixtures/validation_parity.json is asserted against both this
// validator and the live /api/plan endpoint, so the form rejects exactly
// the inputs the service would reject.

import type { Mode, Path, PlanRequest } from './types.js';

export interface PlannerState {
  mode: Mode;
  path: Path;
  etaTheta: number | null;     // standardized margin
  etaDelta: number;            // standardized true difference
  alpha: number;
  beta: number;
  dropout: number;
  n: number | null;            // evaluate power at a fixed size when set
}

export const DEFAULT_STATE: PlannerState = {
  mode: 'ni',
  path: 'distinct',
  etaTheta: 0.3,
  etaDelta: 0,
  alpha: 0.05,
  beta: 0.2,
  dropout: 0,
  n: null,
};

export interface Rejection {
  code: string;
  field: string;
  message: string;
}

/** Mirror of the service-side request checks, same codes, same order. */
export function validatePlanRequest(body: PlanRequest): Rejection | null {
  if (body.mode !== 'ni' && body.mode !== 'eq') {
    return { code: 'invalid_mode', field: 'mode', message: 'choose ni or eq' };
  }
  const alpha = body.alpha ?? 0.05;
  const beta = body.beta ?? 0.2;
  if (!(alpha > 0 && alpha < 1) || !(beta > 0 && beta < 1)) {
    return {
      code: 'level_out_of_range', field: 'alpha',
      message: 'alpha and beta must lie strictly inside (0, 1)',
    };
  }
  const dropout = body.dropout ?? 0;
  if (!(dropout >= 0 && dropout < 1)) {
    return {
      code: 'dropout_out_of_range', field: 'dropout',
      message: 'dropout must lie in [0, 1)',
    };
  }
  if (body.n !== undefined && body.n !== null && body.n < 1) {
    return { code: 'invalid_n', field: 'n', message: 'n must be at least 1' };
  }
  if (body.mode === 'ni') {
    const eta = body.eta ?? (body.eta_theta === undefined || body.eta_theta === null
      ? null
      : body.eta_theta - (body.eta_delta ?? 0));
    if (eta === null || eta === undefined) {
      return { code: 'missing_eta', field: 'etaTheta', message: 'an effect size is needed' };
    }
    if (!(eta > 0)) {
      return {
        code: 'eta_nonpositive', field: 'etaTheta',
        message: 'margin must exceed true difference',
      };
    }
    return null;
  }
  if (body.eta_theta === undefined || body.eta_theta === null) {
    return { code: 'missing_eta', field: 'etaTheta', message: 'a standardized margin is needed' };
  }
  if (!(body.eta_theta > 0)) {
    return {
      code: 'eta_nonpositive', field: 'etaTheta',
      message: 'margin must be positive',
    };
  }
  if (Math.abs(body.eta_delta ?? 0) >= body.eta_theta) {
    return {
      code: 'delta_outside_margin', field: 'etaDelta',
      message: 'margin must exceed true difference',
    };
  }
  return null;
}

export function buildPlanRequest(state: PlannerState): PlanRequest {
  const body: PlanRequest = {
    mode: state.mode,
    path: state.path,
    eta_theta: state.etaTheta ?? undefined,
    eta_delta: state.etaDelta,
    alpha: state.alpha,
    beta: state.beta,
  };
  if (state.dropout > 0) body.dropout = state.dropout;
  if (state.n !== null) body.n = state.n;
  return body;
}

// ---------------------------------------------------------------------------
// URL round trip: the whole what-if state lives in the query string so
// explorations are shareable links.
// ---------------------------------------------------------------------------

const NUM_KEYS: Array<[keyof PlannerState, string]> = [
  ['etaTheta', 'et'], ['etaDelta', 'ed'], ['alpha', 'a'], ['beta', 'b'],
  ['dropout', 'dr'], ['n', 'n'],
];

export function stateToQuery(state: PlannerState): string {
  const q = new URLSearchParams();
  q.set('mode', state.mode);
  q.set('path', state.path);
  for (const [key, short] of NUM_KEYS) {
    const value = state[key];
    if (value !== null && value !== DEFAULT_STATE[key]) {
      q.set(short, String(value));
    }
  }
  return q.toString();
}

export function stateFromQuery(query: string): PlannerState {
  const q = new URLSearchParams(query);
  const state: PlannerState = { ...DEFAULT_STATE };
  const mode = q.get('mode');
  if (mode === 'ni' || mode === 'eq') state.mode = mode;
  const path = q.get('path');
  if (path === 'distinct' || path === 'shared') state.path = path;
  for (const [key, short] of NUM_KEYS) {
    const raw = q.get(short);
    if (raw !== null && raw !== '' && Number.isFinite(Number(raw))) {
      (state as unknown as Record<string, number>)[key] = Number(raw);
    }
  }
  return state;
}
