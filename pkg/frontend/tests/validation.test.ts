import { readFileSync } from 'node:fs';

import { describe, expect, it } from 'vitest';

import { validatePlanRequest } from '../src/state.js';
import type { PlanRequest } from '../src/types.js';

interface ParityCase {
  name: string;
  body: PlanRequest;
  expect: string;
}

const table = JSON.parse(
  readFileSync(new URL('./fixtures/validation_parity.json', import.meta.url), 'utf-8'),
) as { cases: ParityCase[] };

describe('validation parity with the API', () => {
  // the same fixture is asserted against the live /api/plan endpoint in
  // the service's test suite; together the two suites guarantee the form
  // rejects exactly what the API rejects, with the same codes
  for (const parityCase of table.cases) {
    it(parityCase.name, () => {
      const rejection = validatePlanRequest(parityCase.body);
      if (parityCase.expect === 'ok') {
        expect(rejection).toBeNull();
      } else {
        expect(rejection?.code).toBe(parityCase.expect);
      }
    });
  }

  it('covers both accepted and rejected inputs', () => {
    const outcomes = new Set(table.cases.map((c) => c.expect === 'ok'));
    expect(outcomes).toEqual(new Set([true, false]));
    expect(table.cases.length).toBeGreaterThanOrEqual(20);
  });
});
