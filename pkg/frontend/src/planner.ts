// The what-if planning flow: debounce keystrokes, keep at most one
// request in flight (newer input aborts the older request), and render
// the service's numbers verbatim.

import { ApiClient, ApiRejection } from './api.js';
import {
  PlannerState,
  Rejection,
  buildPlanRequest,
  validatePlanRequest,
} from './state.js';
import type { PlanResponse } from './types.js';

export const DEBOUNCE_MS = 250;

export interface PlanView {
  /** Verbatim string forms of the service's numbers. */
  nText: string;
  powerText: string;
  inflatedText: string | null;
  version: string;
  raw: PlanResponse;
}

/** Display strings are String(value) of the parsed JSON numbers: no
 * rounding, no local arithmetic. */
export function planViewModel(resp: PlanResponse): PlanView {
  return {
    nText: String(resp.n),
    powerText: String(resp.achieved_power),
    inflatedText: resp.n_inflated === undefined ? null : String(resp.n_inflated),
    version: resp.version,
    raw: resp,
  };
}

export interface PlannerEvents {
  onResult(view: PlanView): void;
  onInvalid(rejection: Rejection): void;
  onApiError(error: ApiRejection): void;
  onPending(pending: boolean): void;
}

export class PlannerFlow {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;
  private serial = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly events: PlannerEvents,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Called on every input change; trailing-edge debounced. */
  update(state: PlannerState): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.submit(state);
    }, this.debounceMs);
  }

  /** Validate, cancel any in-flight request, query, render. */
  async submit(state: PlannerState): Promise<void> {
    const body = buildPlanRequest(state);
    const rejection = validatePlanRequest(body);
    if (rejection) {
      this.events.onInvalid(rejection);
      return;
    }
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const ticket = ++this.serial;
    this.events.onPending(true);
    try {
      const resp = await this.api.plan(body, controller.signal);
      if (ticket !== this.serial) return; // superseded while awaiting
      this.events.onResult(planViewModel(resp));
    } catch (err) {
      if (controller.signal.aborted) return;
      if (err instanceof ApiRejection) {
        this.events.onApiError(err);
      } else {
        throw err;
      }
    } finally {
      if (ticket === this.serial) this.events.onPending(false);
    }
  }
}
