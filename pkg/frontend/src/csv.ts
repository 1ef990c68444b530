// Client-side parsing of the trial CSV schema, mirroring the command
// line's line-numbered diagnostics.  Parsed records go to the service
// untouched; the upload never reaches any local statistics.

import type { TrialRecord } from './types.js';

export const TRIAL_HEADER = 'id,stage1,response,stage2,outcome';

export class CsvError extends Error {
  constructor(public readonly line: number, message: string) {
    super(line === 0 ? message : `line ${line}: ${message}`);
  }
}

export function parseTrialCsv(text: string): TrialRecord[] {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() === '') {
    throw new CsvError(0, `missing header; expected "${TRIAL_HEADER}"`);
  }
  if (lines[0].trim() !== TRIAL_HEADER) {
    throw new CsvError(1, `bad header "${lines[0].trim()}"; expected "${TRIAL_HEADER}"`);
  }
  const records: TrialRecord[] = [];
  for (let i = 1; i < lines.length; i += 1) {
    const line = lines[i];
    if (line.trim() === '') continue;
    const lineno = i + 1;
    const fields = line.split(',').map((f) => f.trim());
    if (fields.length !== 5) {
      throw new CsvError(lineno, `expected 5 fields, got ${fields.length}`);
    }
    const [id, stage1, response, stage2, outcomeText] = fields;
    if (stage1 !== 'a' && stage1 !== 'ac') {
      throw new CsvError(lineno, `stage1 must be 'a' or 'ac', got '${stage1}'`);
    }
    if (response !== '0' && response !== '1') {
      throw new CsvError(lineno, `response must be 0 or 1, got '${response}'`);
    }
    if (response === '1' && stage2 !== stage1) {
      throw new CsvError(lineno, `responder stage2 must equal stage1 ('${stage1}'), got '${stage2}'`);
    }
    if (response === '0' && stage2 !== 'm' && stage2 !== 'v') {
      throw new CsvError(lineno, `non-responder stage2 must be 'm' or 'v', got '${stage2}'`);
    }
    const outcome = Number(outcomeText);
    if (outcomeText === '' || !Number.isFinite(outcome)) {
      throw new CsvError(lineno, `outcome '${outcomeText}' is not a decimal`);
    }
    records.push({ id, stage1, response: Number(response), stage2, outcome });
  }
  return records;
}
