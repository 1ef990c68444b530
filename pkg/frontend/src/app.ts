// DOM wiring: forms in, API numbers out.  All logic lives in the
// testable modules; this file only moves strings between them and the
// page.

import { ApiClient, ApiRejection } from './api.js';
import { buildCurveSeries, effectGrid, renderCurvesSvg } from './curves.js';
import { CsvError, parseTrialCsv } from './csv.js';
import { PlannerFlow } from './planner.js';
import { reportViewModel } from './report.js';
import {
  DEFAULT_STATE,
  PlannerState,
  stateFromQuery,
  stateToQuery,
} from './state.js';
import type { Mode, Path } from './types.js';

const api = new ApiClient('');

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function readState(): PlannerState {
  const num = (id: string, fallback: number): number => {
    const raw = el<HTMLInputElement>(id).value;
    return raw === '' ? fallback : Number(raw);
  };
  const nRaw = el<HTMLInputElement>('n').value;
  return {
    mode: el<HTMLSelectElement>('mode').value as Mode,
    path: el<HTMLSelectElement>('path').value as Path,
    etaTheta: el<HTMLInputElement>('etaTheta').value === ''
      ? null : Number(el<HTMLInputElement>('etaTheta').value),
    etaDelta: num('etaDelta', 0),
    alpha: num('alpha', DEFAULT_STATE.alpha),
    beta: num('beta', DEFAULT_STATE.beta),
    dropout: num('dropout', 0),
    n: nRaw === '' ? null : Number(nRaw),
  };
}

function writeState(state: PlannerState): void {
  el<HTMLSelectElement>('mode').value = state.mode;
  el<HTMLSelectElement>('path').value = state.path;
  el<HTMLInputElement>('etaTheta').value = state.etaTheta === null ? '' : String(state.etaTheta);
  el<HTMLInputElement>('etaDelta').value = String(state.etaDelta);
  el<HTMLInputElement>('alpha').value = String(state.alpha);
  el<HTMLInputElement>('beta').value = String(state.beta);
  el<HTMLInputElement>('dropout').value = String(state.dropout);
  el<HTMLInputElement>('n').value = state.n === null ? '' : String(state.n);
}

const fieldErr = el<HTMLDivElement>('plan-error');
const planner = new PlannerFlow(api, {
  onResult(view) {
    fieldErr.textContent = '';
    el<HTMLSpanElement>('out-n').textContent = view.nText;
    el<HTMLSpanElement>('out-power').textContent = view.powerText;
    el<HTMLSpanElement>('out-inflated').textContent = view.inflatedText ?? '-';
    el<HTMLSpanElement>('out-version').textContent = view.version;
  },
  onInvalid(rejection) {
    fieldErr.textContent = `${rejection.field}: ${rejection.message}`;
  },
  onApiError(err) {
    fieldErr.textContent = `${err.body.error}: ${err.body.detail}`;
  },
  onPending(pending) {
    el<HTMLSpanElement>('pending').textContent = pending ? '...' : '';
  },
});

function onChange(): void {
  const state = readState();
  history.replaceState(null, '', `?${stateToQuery(state)}`);
  planner.update(state);
}

for (const id of ['mode', 'path', 'etaTheta', 'etaDelta', 'alpha', 'beta',
                  'dropout', 'n']) {
  el(id).addEventListener('input', onChange);
  el(id).addEventListener('change', onChange);
}

el<HTMLButtonElement>('draw-curves').addEventListener('click', async () => {
  const state = readState();
  const nList = el<HTMLInputElement>('curve-ns').value
    .split(',').map((s) => Number(s.trim())).filter((v) => Number.isFinite(v) && v > 0);
  const grid = effectGrid(0.05, 0.6, 0.05);
  const target = el<HTMLDivElement>('curves');
  target.textContent = 'loading...';
  try {
    const series = await buildCurveSeries(api, state.mode, state.path, nList,
                                          grid, state.alpha);
    target.innerHTML = renderCurvesSvg(series);
  } catch (err) {
    target.textContent = err instanceof ApiRejection
      ? `${err.body.error}: ${err.body.detail}` : String(err);
  }
});

el<HTMLInputElement>('upload').addEventListener('change', async (event) => {
  const input = event.target as HTMLInputElement;
  const panel = el<HTMLDivElement>('report');
  const file = input.files?.[0];
  if (!file) return;
  panel.textContent = 'analyzing...';
  try {
    const records = parseTrialCsv(await file.text());
    const resp = await api.analyze({
      records,
      mode: el<HTMLSelectElement>('an-mode').value as Mode,
      control: el<HTMLSelectElement>('an-control').value,
      new: el<HTMLSelectElement>('an-new').value,
      theta: Number(el<HTMLInputElement>('an-theta').value),
    });
    const view = reportViewModel(resp.report);
    panel.innerHTML = [
      `<h3>${view.title}</h3>`,
      `<p class="decision">${view.decision}</p>`,
      '<table>',
      ...view.rows.map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`),
      '</table>',
    ].join('');
  } catch (err) {
    if (err instanceof CsvError) {
      panel.textContent = err.message;
    } else if (err instanceof ApiRejection) {
      panel.textContent = `${err.body.error}: ${err.body.detail}`;
    } else {
      panel.textContent = String(err);
    }
  }
});

// boot: hydrate from the URL so what-if links are shareable
const initial = stateFromQuery(location.search);
writeState(initial);
void planner.submit(initial);
