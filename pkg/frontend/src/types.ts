// Shapes of the gateway's JSON documents. The UI renders these verbatim;
// every statistic shown on screen originates server-side.

export type PanelStateName =
  | 'draft'
  | 'round1_open'
  | 'round1_closed'
  | 'round2_open'
  | 'round2_closed'
  | 'finalized';

export const PANEL_STATES: PanelStateName[] = [
  'draft',
  'round1_open',
  'round1_closed',
  'round2_open',
  'round2_closed',
  'finalized',
];

export interface PanelSummary {
  id: string;
  field: string;
  state: PanelStateName;
  experts: number;
  publishers: number;
  responses: Record<string, number>;
  finalized: boolean;
}

export interface PanelListDoc {
  panels: PanelSummary[];
}

export interface QuestionnaireItemDoc {
  publisher: string;
  scope: string;
  displayed_numeric: number;
  displayed_letter: string;
  // round 2 carries the round-1 display so changed categories can be flagged
  previous_numeric: number | null;
}

export interface QuestionnaireDoc {
  panel_id: string;
  field: string;
  expert_id: string;
  round: number;
  items: QuestionnaireItemDoc[];
}

export interface ResponseItemPayload {
  publisher: string;
  known: boolean;
  disagree: boolean;
  new_score: number | null;
}

export interface SubmitPayload {
  items: ResponseItemPayload[];
  suggested_publishers: string[];
}

export interface SubmitReceipt {
  panel_id: string;
  expert_id: string;
  round: number;
  items_recorded: number;
  submitted_at: string;
}

export interface ResponseRateRow {
  field: string;
  round: number;
  sample_n: number;
  answers: number;
  rate_percent: number;
  provisional: boolean;
}

export interface ResponseRatesDoc {
  panel_id: string;
  rows: ResponseRateRow[];
  totals: ResponseRateRow[];
}

export interface ChangeStats {
  mean: number;
  sd: number;
}

export interface ConcentrationSide {
  gini: number;
  lorenz: number[][];
}

export interface AnalyticsDoc {
  panel_id: string;
  response_rates: ResponseRateRow[];
  response_rate_totals: ResponseRateRow[];
  change_stats: Record<string, ChangeStats>;
  concentration: {
    before: ConcentrationSide;
    after: ConcentrationSide;
    delta: number;
  };
}

export interface NonrespondentsDoc {
  panel_id: string;
  round: number;
  expert_ids: string[];
}

export interface AggregatesDoc {
  panel_id: string;
  round: number;
  aggregates: Record<string, { votes: number; mean_score: number; displayed_numeric: number }>;
}
