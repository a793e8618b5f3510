// Coordinator dashboard: pure view-model helpers plus an HTML renderer.
// Everything shown is a straight copy of the gateway's documents; the
// client never recomputes a statistic.

import { ApiClient, ApiError } from './api.js';
import { attr, escapeHtml } from './html.js';
import type {
  AnalyticsDoc,
  NonrespondentsDoc,
  PanelStateName,
  PanelSummary,
  ResponseRateRow,
  ResponseRatesDoc,
} from './types.js';

export interface RoundControls {
  openRound1: boolean;
  closeRound1: boolean;
  openRound2: boolean;
  closeRound2: boolean;
  finalize: boolean;
}

// One legal command per state; everything else would draw a 409.
const CONTROLS_BY_STATE: Record<PanelStateName, RoundControls> = {
  draft: { openRound1: true, closeRound1: false, openRound2: false, closeRound2: false, finalize: false },
  round1_open: { openRound1: false, closeRound1: true, openRound2: false, closeRound2: false, finalize: false },
  round1_closed: { openRound1: false, closeRound1: false, openRound2: true, closeRound2: false, finalize: false },
  round2_open: { openRound1: false, closeRound1: false, openRound2: false, closeRound2: true, finalize: false },
  round2_closed: { openRound1: false, closeRound1: false, openRound2: false, closeRound2: false, finalize: true },
  finalized: { openRound1: false, closeRound1: false, openRound2: false, closeRound2: false, finalize: false },
};

export function roundControls(state: PanelStateName): RoundControls {
  const controls = CONTROLS_BY_STATE[state];
  if (!controls) throw new Error(`unknown panel state ${state}`);
  return controls;
}

// The round whose response tally is currently of interest, if any.
export function currentRound(state: PanelStateName): 1 | 2 | null {
  if (state === 'draft') return null;
  if (state === 'round1_open' || state === 'round1_closed') return 1;
  return 2;
}

export interface DashboardModel {
  summary: PanelSummary;
  rates: ResponseRatesDoc;
  nonrespondents: NonrespondentsDoc | null;
  analytics: AnalyticsDoc | null;
}

export type DashboardApi = Pick<
  ApiClient,
  'panelSummary' | 'responseRates' | 'nonrespondents' | 'analytics'
>;

export async function fetchDashboardModel(api: DashboardApi, panelId: string): Promise<DashboardModel> {
  const summary = await api.panelSummary(panelId);
  const rates = await api.responseRates(panelId);
  const round = currentRound(summary.state);
  const nonrespondents = round === null ? null : await api.nonrespondents(panelId, round);
  let analytics: AnalyticsDoc | null = null;
  try {
    analytics = await api.analytics(panelId);
  } catch (error) {
    if (!(error instanceof ApiError && error.code === 'NOT_FINALIZED')) throw error;
  }
  return { summary, rates, nonrespondents, analytics };
}

// -- Lorenz chart ----------------------------------------------------------

export interface ChartSpec {
  width: number;
  height: number;
  pad: number;
}

export const LORENZ_CHART: ChartSpec = { width: 320, height: 320, pad: 24 };

// Data space is the unit square; the y axis flips into screen space, so
// (0,0) maps to the bottom-left corner and (1,1) to the top-right.
export function lorenzPixel(point: number[], spec: ChartSpec): [number, number] {
  const [x, y] = point;
  const innerW = spec.width - 2 * spec.pad;
  const innerH = spec.height - 2 * spec.pad;
  return [spec.pad + x * innerW, spec.height - spec.pad - y * innerH];
}

export function lorenzPath(points: number[][], spec: ChartSpec): string {
  return points
    .map((point, index) => {
      const [px, py] = lorenzPixel(point, spec);
      return `${index === 0 ? 'M' : 'L'}${px},${py}`;
    })
    .join(' ');
}

function lorenzSvg(analytics: AnalyticsDoc, spec: ChartSpec): string {
  const { before, after } = analytics.concentration;
  const [x0, y0] = lorenzPixel([0, 0], spec);
  const [x1, y1] = lorenzPixel([1, 1], spec);
  return `
    <svg class="lorenz" viewBox="0 0 ${spec.width} ${spec.height}" role="img"
         aria-label="Lorenz curves before and after the consultation">
      <line class="diagonal" x1="${x0}" y1="${y0}" x2="${x1}" y2="${y1}" />
      <path class="lorenz-before" d="${lorenzPath(before.lorenz, spec)}" fill="none" />
      <path class="lorenz-after" d="${lorenzPath(after.lorenz, spec)}" fill="none" />
    </svg>`;
}

// -- HTML ------------------------------------------------------------------

function rateRow(row: ResponseRateRow, cssClass = ''): string {
  return `<tr${cssClass ? ` class="${cssClass}"` : ''}>
    <td>${escapeHtml(row.field)}</td>
    <td>${row.round}</td>
    <td>${row.sample_n}</td>
    <td>${row.answers}</td>
    <td>${row.rate_percent}${row.provisional ? ' (provisional)' : ''}</td>
  </tr>`;
}

function ratesTable(rates: ResponseRatesDoc): string {
  const rows = rates.rows.map((row) => rateRow(row)).join('\n');
  const totals = rates.totals.map((row) => rateRow(row, 'total')).join('\n');
  return `
    <table class="rates">
      <thead><tr><th>Field</th><th>Round</th><th>Sample</th><th>Answers</th><th>Rate %</th></tr></thead>
      <tbody>${rows}${totals}</tbody>
    </table>`;
}

function controlsBlock(summary: PanelSummary): string {
  const controls = roundControls(summary.state);
  const button = (action: string, enabled: boolean, label: string) =>
    `<button data-action="${action}" ${enabled ? '' : 'disabled'}>${label}</button>`;
  return `
    <div class="controls">
      ${button('open-round-1', controls.openRound1, 'Open round 1')}
      ${button('close-round-1', controls.closeRound1, 'Close round 1')}
      ${button('open-round-2', controls.openRound2, 'Open round 2')}
      ${button('close-round-2', controls.closeRound2, 'Close round 2')}
      ${button('finalize', controls.finalize, 'Finalize')}
    </div>`;
}

function nonrespondentsBlock(model: DashboardModel): string {
  const doc = model.nonrespondents;
  if (!doc) return '<p class="notice">No round started yet.</p>';
  const url = `/api/panels/${encodeURIComponent(doc.panel_id)}/nonrespondents?round=${doc.round}`;
  return `<p>${doc.expert_ids.length} nonrespondent${doc.expert_ids.length === 1 ? '' : 's'}
    in round ${doc.round}. <a class="export" href=${attr(url)}>Export list</a></p>`;
}

function changeStatsTable(analytics: AnalyticsDoc): string {
  const rows = Object.entries(analytics.change_stats)
    .map(
      ([scope, stats]) => `<tr>
        <td>${escapeHtml(scope)}</td><td>${stats.mean}</td><td>${stats.sd}</td>
      </tr>`,
    )
    .join('\n');
  return `
    <table class="change-stats">
      <thead><tr><th>Scope</th><th>Mean shift</th><th>SD</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

function concentrationBlock(model: DashboardModel): string {
  const analytics = model.analytics;
  if (!analytics) {
    return '<p class="notice pending">Concentration: pending finalization.</p>';
  }
  const { before, after, delta } = analytics.concentration;
  return `
    ${lorenzSvg(analytics, LORENZ_CHART)}
    <p class="gini">Gini before ${before.gini}, after ${after.gini} (reduction ${delta}).</p>
    ${changeStatsTable(analytics)}`;
}

export function renderDashboard(model: DashboardModel): string {
  const summary = model.summary;
  return `
    <section class="dashboard" data-state="${summary.state}">
      <h1>${escapeHtml(summary.field)} panel <code>${escapeHtml(summary.id)}</code></h1>
      <p class="summary">State <strong>${summary.state}</strong>;
        ${summary.experts} experts; ${summary.publishers} publishers;
        ${summary.responses['1']} response${summary.responses['1'] === 1 ? '' : 's'} in round 1,
        ${summary.responses['2']} in round 2.</p>
      ${controlsBlock(summary)}
      <h2>Response rates</h2>
      ${ratesTable(model.rates)}
      ${nonrespondentsBlock(model)}
      <h2>Concentration</h2>
      ${concentrationBlock(model)}
      <p class="refreshed"><button data-action="refresh">Refresh</button></p>
    </section>`;
}

export class DashboardPage {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly panelId: string,
  ) {}

  async start(): Promise<void> {
    this.bind();
    await this.refresh();
  }

  private async refresh(): Promise<void> {
    const model = await fetchDashboardModel(this.api, this.panelId);
    this.root.innerHTML = renderDashboard(model);
  }

  private async command(action: string): Promise<void> {
    try {
      if (action === 'open-round-1') await this.api.openRound(this.panelId, 1);
      else if (action === 'close-round-1') await this.api.closeRound(this.panelId, 1);
      else if (action === 'open-round-2') await this.api.openRound(this.panelId, 2);
      else if (action === 'close-round-2') await this.api.closeRound(this.panelId, 2);
      else if (action === 'finalize') await this.api.finalizePanel(this.panelId);
    } catch (error) {
      // a concurrent coordinator may have raced us; the refetch shows truth
      if (!(error instanceof ApiError)) throw error;
    }
    await this.refresh();
  }

  private bind(): void {
    this.root.addEventListener('click', (event) => {
      const target = (event.target as HTMLElement).closest('button[data-action]');
      if (!target || target.hasAttribute('disabled')) return;
      const action = target.getAttribute('data-action');
      if (action === 'refresh') void this.refresh();
      else if (action) void this.command(action);
    });
  }
}
