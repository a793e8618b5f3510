// Shared documents for the unit suites: a small two-list panel in the
// shape the gateway serves.

import type {
  AnalyticsDoc,
  PanelSummary,
  QuestionnaireDoc,
  ResponseRatesDoc,
} from '../src/types.js';

export function questionnaireDoc(overrides: Partial<QuestionnaireDoc> = {}): QuestionnaireDoc {
  return {
    panel_id: 'panel-history',
    field: 'History',
    expert_id: 'e00',
    round: 1,
    items: [
      { publisher: 'Alpha Press', scope: 'domestic', displayed_numeric: 3, displayed_letter: 'B', previous_numeric: null },
      { publisher: 'Beta Editorial', scope: 'domestic', displayed_numeric: 2, displayed_letter: 'C', previous_numeric: null },
      { publisher: 'Cambridge Scholars', scope: 'foreign', displayed_numeric: 3, displayed_letter: 'B', previous_numeric: null },
      { publisher: 'Springer', scope: 'foreign', displayed_numeric: 2, displayed_letter: 'C', previous_numeric: null },
    ],
    ...overrides,
  };
}

export function panelSummary(overrides: Partial<PanelSummary> = {}): PanelSummary {
  return {
    id: 'panel-history',
    field: 'History',
    state: 'round1_open',
    experts: 4,
    publishers: 8,
    responses: { '1': 1, '2': 0 },
    finalized: false,
    ...overrides,
  };
}

export function ratesDoc(): ResponseRatesDoc {
  return {
    panel_id: 'panel-history',
    rows: [
      { field: 'History', round: 1, sample_n: 191, answers: 103, rate_percent: 53.93, provisional: false },
      { field: 'History', round: 2, sample_n: 103, answers: 86, rate_percent: 83.5, provisional: true },
    ],
    totals: [
      { field: 'TOTAL', round: 1, sample_n: 191, answers: 103, rate_percent: 53.93, provisional: false },
      { field: 'TOTAL', round: 2, sample_n: 103, answers: 86, rate_percent: 83.5, provisional: true },
    ],
  };
}

export function analyticsDoc(): AnalyticsDoc {
  const rates = ratesDoc();
  return {
    panel_id: 'panel-history',
    response_rates: rates.rows,
    response_rate_totals: rates.totals,
    change_stats: {
      domestic: { mean: 0.25, sd: 0.4330127018922193 },
      foreign: { mean: 0.5, sd: 0.5 },
    },
    concentration: {
      before: {
        gini: 0.25,
        lorenz: [[0, 0], [0.25, 0.1], [0.5, 0.3], [0.75, 0.6], [1, 1]],
      },
      after: {
        gini: 0.15,
        lorenz: [[0, 0], [0.25, 0.15], [0.5, 0.4], [0.75, 0.65], [1, 1]],
      },
      delta: 0.1,
    },
  };
}
