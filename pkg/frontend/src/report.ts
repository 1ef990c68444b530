// Report card view-model: verbatim string forms of the analysis numbers.

import type { TestReportBody } from './types.js';

export interface ReportView {
  title: string;
  decision: string;
  rows: Array<[string, string]>;
}

export function reportViewModel(report: TestReportBody): ReportView {
  const kind = report.kind === 'non_inferiority' ? 'Non-inferiority' : 'Equivalence';
  const rows: Array<[string, string]> = [
    ['n', String(report.n)],
    [`mean outcome, control AI (${report.control})`, String(report.mean_first)],
    [`mean outcome, new AI (${report.new})`, String(report.mean_second)],
    ['margin', String(report.theta)],
    ['Z (non-inferiority)', String(report.z_ni)],
    ['p-value (non-inferiority)', String(report.p_ni)],
    ['BF upper bound (non-inferiority)', String(report.bf_bound_ni)],
  ];
  if (report.kind === 'equivalence') {
    rows.push(
      ['Z (non-superiority)', String(report.z_ns)],
      ['p-value (non-superiority)', String(report.p_ns)],
      ['BF upper bound (non-superiority)', String(report.bf_bound_ns)],
    );
  }
  return {
    title: `${kind} test (${report.path}-path)`,
    decision: report.decision,
    rows,
  };
}
