// Thin fetch client for the gateway API. Failed requests throw ApiError
// carrying the server's machine-readable code so callers can branch on
// it (ROUND_CLOSED, UNKNOWN_TOKEN, NOT_FINALIZED, ...).

import type {
  AggregatesDoc,
  AnalyticsDoc,
  NonrespondentsDoc,
  PanelListDoc,
  PanelSummary,
  QuestionnaireDoc,
  ResponseRatesDoc,
  SubmitPayload,
  SubmitReceipt,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
    this.code = code;
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let code = 'UNKNOWN';
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && body.error) {
      code = String(body.error.code);
      message = String(body.error.message);
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  readonly baseUrl: string;

  constructor(baseUrl = '') {
    this.baseUrl = baseUrl;
  }

  private async fetchOk(path: string, init?: RequestInit): Promise<Response> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) throw await toApiError(response);
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.fetchOk(path)).json();
  }

  private async postJson<T>(path: string, body?: unknown): Promise<T> {
    const response = await this.fetchOk(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: body === undefined ? null : JSON.stringify(body),
    });
    return response.json();
  }

  questionnaire(token: string): Promise<QuestionnaireDoc> {
    return this.getJson(`/api/q/${encodeURIComponent(token)}`);
  }

  submit(token: string, payload: SubmitPayload): Promise<SubmitReceipt> {
    return this.postJson(`/api/q/${encodeURIComponent(token)}`, payload);
  }

  listPanels(): Promise<PanelListDoc> {
    return this.getJson('/api/panels');
  }

  panelSummary(panelId: string): Promise<PanelSummary> {
    return this.getJson(`/api/panels/${encodeURIComponent(panelId)}`);
  }

  openRound(panelId: string, round: number): Promise<PanelSummary> {
    return this.postJson(`/api/panels/${encodeURIComponent(panelId)}/rounds/${round}/open`);
  }

  closeRound(panelId: string, round: number): Promise<PanelSummary> {
    return this.postJson(`/api/panels/${encodeURIComponent(panelId)}/rounds/${round}/close`);
  }

  finalizePanel(panelId: string): Promise<unknown> {
    return this.postJson(`/api/panels/${encodeURIComponent(panelId)}/finalize`);
  }

  aggregates(panelId: string, round: number): Promise<AggregatesDoc> {
    return this.getJson(`/api/panels/${encodeURIComponent(panelId)}/aggregates?round=${round}`);
  }

  responseRates(panelId: string): Promise<ResponseRatesDoc> {
    return this.getJson(`/api/panels/${encodeURIComponent(panelId)}/response-rates`);
  }

  analytics(panelId: string): Promise<AnalyticsDoc> {
    return this.getJson(`/api/panels/${encodeURIComponent(panelId)}/analytics`);
  }

  nonrespondents(panelId: string, round: number): Promise<NonrespondentsDoc> {
    return this.getJson(`/api/panels/${encodeURIComponent(panelId)}/nonrespondents?round=${round}`);
  }

  // fixture plumbing, used by tests and setup scripts rather than the pages

  async importRanking(field: string, scope: string, csv: string): Promise<unknown> {
    const params = new URLSearchParams({ field, scope });
    const response = await this.fetchOk(`/api/rankings?${params}`, {
      method: 'POST',
      headers: { 'Content-Type': 'text/csv' },
      body: csv,
    });
    return response.json();
  }

  async importRoster(field: string, csv: string): Promise<unknown> {
    const params = new URLSearchParams({ field });
    const response = await this.fetchOk(`/api/rosters?${params}`, {
      method: 'POST',
      headers: { 'Content-Type': 'text/csv' },
      body: csv,
    });
    return response.json();
  }

  createPanel(payload: { field: string; seed: number; panel_id?: string }): Promise<PanelSummary> {
    return this.postJson('/api/panels', payload);
  }
}
