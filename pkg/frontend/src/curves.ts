// Power-curve flow: one curve per trial size over a grid of standardized
// effect sizes.  Every plotted value is fetched from the service's power
// evaluation; the chart is dependency-free SVG with exact values in
// hover titles.

import { ApiClient } from './api.js';
import type { Mode, Path } from './types.js';

export interface CurvePoint {
  eta: number;
  power: number;          // exactly as returned by the API
}

export interface CurveSeries {
  n: number;
  points: CurvePoint[];
}

export function effectGrid(start: number, stop: number, step: number): number[] {
  if (!(step > 0) || !(stop >= start)) return [];
  const out: number[] = [];
  for (let v = start; v <= stop + 1e-12; v += step) {
    out.push(Number(v.toFixed(12)));
  }
  return out;
}

export async function buildCurveSeries(
  api: ApiClient,
  mode: Mode,
  path: Path,
  nList: number[],
  grid: number[],
  alpha: number,
  etaDeltaFraction = 0,
  signal?: AbortSignal,
): Promise<CurveSeries[]> {
  if (nList.length === 0 || grid.length === 0) {
    throw new Error('curve flow needs at least one trial size and one grid point');
  }
  const series: CurveSeries[] = [];
  for (const n of nList) {
    const points: CurvePoint[] = [];
    for (const eta of grid) {
      const resp = await api.plan({
        mode,
        path,
        eta_theta: eta,
        eta_delta: eta * etaDeltaFraction,
        alpha,
        n,
      }, signal);
      points.push({ eta, power: resp.achieved_power });
    }
    series.push({ n, points });
  }
  return series;
}

const WIDTH = 560;
const HEIGHT = 360;
const PAD = 42;
const COLORS = ['#2563eb', '#059669', '#d97706', '#dc2626', '#7c3aed'];

function x(eta: number, lo: number, hi: number): number {
  return PAD + ((eta - lo) / (hi - lo || 1)) * (WIDTH - 2 * PAD);
}

function y(power: number): number {
  return HEIGHT - PAD - power * (HEIGHT - 2 * PAD);
}

/** Render the series as an SVG document; each marker's <title> carries
 * the exact (eta, power) pair from the API. */
export function renderCurvesSvg(series: CurveSeries[]): string {
  const all = series.flatMap((s) => s.points.map((p) => p.eta));
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" `
    + `font-family="system-ui" font-size="11">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  ];
  for (const frac of [0, 0.2, 0.4, 0.6, 0.8, 1]) {
    const gy = y(frac);
    parts.push(
      `<line x1="${PAD}" y1="${gy}" x2="${WIDTH - PAD}" y2="${gy}" `
      + `stroke="#e5e7eb"/>`,
      `<text x="${PAD - 6}" y="${gy + 3}" text-anchor="end">${frac.toFixed(1)}</text>`,
    );
  }
  series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    const d = s.points
      .map((p, k) => `${k === 0 ? 'M' : 'L'}${x(p.eta, lo, hi).toFixed(1)} ${y(p.power).toFixed(1)}`)
      .join(' ');
    parts.push(`<path d="${d}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
    for (const p of s.points) {
      parts.push(
        `<circle cx="${x(p.eta, lo, hi).toFixed(1)}" cy="${y(p.power).toFixed(1)}" `
        + `r="3" fill="${color}"><title>N=${s.n} eta=${p.eta} power=${p.power}</title></circle>`,
      );
    }
    parts.push(
      `<text x="${WIDTH - PAD + 4}" y="${y(s.points[s.points.length - 1].power) + 3}" `
      + `fill="${color}">N=${s.n}</text>`,
    );
  });
  parts.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 8}" text-anchor="middle">`
    + `standardized effect size</text>`,
    '</svg>',
  );
  return parts.join('');
}
