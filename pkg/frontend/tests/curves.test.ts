import { describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { buildCurveSeries, effectGrid, renderCurvesSvg } from '../src/curves.js';

function planStub(power: (n: number, eta: number) => number) {
  return vi.fn(async (_url: string, init?: RequestInit) => {
    const body = JSON.parse((init!.body as string));
    return new Response(JSON.stringify({
      n: body.n,
      achieved_power: power(body.n, body.eta_theta),
      inputs: body,
      version: 't',
    }), { status: 200, headers: { 'content-type': 'application/json' } });
  });
}

describe('effect grid', () => {
  it('builds an inclusive grid', () => {
    expect(effectGrid(0.1, 0.3, 0.1)).toEqual([0.1, 0.2, 0.3]);
  });

  it('returns nothing for degenerate ranges', () => {
    expect(effectGrid(0.3, 0.1, 0.1)).toEqual([]);
    expect(effectGrid(0.1, 0.3, 0)).toEqual([]);
  });
});

describe('curve flow', () => {
  it('assembles one series per trial size from API responses only', async () => {
    const fetchImpl = planStub((n, eta) => Math.min(0.999, (n / 1000) + eta));
    const api = new ApiClient('', fetchImpl);
    const series = await buildCurveSeries(api, 'ni', 'distinct',
                                          [100, 200], [0.1, 0.2], 0.05);
    expect(series.map((s) => s.n)).toEqual([100, 200]);
    expect(series[0].points).toEqual([
      { eta: 0.1, power: 0.2 }, { eta: 0.2, power: 0.30000000000000004 },
    ]);
    expect(fetchImpl).toHaveBeenCalledTimes(4);
  });

  it('larger trials draw above smaller ones when the service says so', async () => {
    const fetchImpl = planStub((n, eta) => Math.min(0.999, eta * Math.sqrt(n) / 10));
    const api = new ApiClient('', fetchImpl);
    const series = await buildCurveSeries(api, 'ni', 'distinct',
                                          [100, 500], effectGrid(0.1, 0.5, 0.1), 0.05);
    series[0].points.forEach((p, i) => {
      expect(series[1].points[i].power).toBeGreaterThan(p.power);
    });
  });

  it('rejects empty grids', async () => {
    const api = new ApiClient('', planStub(() => 0.5));
    await expect(buildCurveSeries(api, 'ni', 'distinct', [], [0.1], 0.05))
      .rejects.toThrow(/at least one/);
    await expect(buildCurveSeries(api, 'ni', 'distinct', [100], [], 0.05))
      .rejects.toThrow(/at least one/);
  });

  it('handles a single-point grid without crashing', async () => {
    const api = new ApiClient('', planStub(() => 0.42));
    const series = await buildCurveSeries(api, 'eq', 'shared', [300], [0.25], 0.05);
    const svg = renderCurvesSvg(series);
    expect(svg).toContain('<svg');
    expect(svg).toContain('power=0.42');
  });

  it('puts the exact API values into hover titles', async () => {
    const api = new ApiClient('', planStub((n, eta) => eta + n * 1e-6));
    const series = await buildCurveSeries(api, 'ni', 'distinct',
                                          [100], [0.15, 0.25], 0.05);
    const svg = renderCurvesSvg(series);
    for (const p of series[0].points) {
      expect(svg).toContain(`<title>N=100 eta=${p.eta} power=${p.power}</title>`);
    }
  });
});
