import { describe, expect, it } from 'vitest';

import { ApiError } from '../src/api.js';
import {
  currentRound,
  fetchDashboardModel,
  LORENZ_CHART,
  lorenzPath,
  lorenzPixel,
  renderDashboard,
  roundControls,
  type DashboardModel,
} from '../src/dashboard.js';
import { PANEL_STATES, type PanelStateName } from '../src/types.js';
import { analyticsDoc, panelSummary, ratesDoc } from './fixtures.js';

const ENABLED_BY_STATE: Record<PanelStateName, string | null> = {
  draft: 'openRound1',
  round1_open: 'closeRound1',
  round1_closed: 'openRound2',
  round2_open: 'closeRound2',
  round2_closed: 'finalize',
  finalized: null,
};

function model(state: PanelStateName, finalized = state === 'finalized'): DashboardModel {
  return {
    summary: panelSummary({ state, finalized }),
    rates: ratesDoc(),
    nonrespondents:
      state === 'draft'
        ? null
        : { panel_id: 'panel-history', round: currentRound(state)!, expert_ids: ['e01', 'e02'] },
    analytics: finalized ? analyticsDoc() : null,
  };
}

describe('roundControls', () => {
  it('enables exactly the one legal command per state', () => {
    for (const state of PANEL_STATES) {
      const controls = roundControls(state) as unknown as Record<string, boolean>;
      const expected = ENABLED_BY_STATE[state];
      for (const [name, enabled] of Object.entries(controls)) {
        expect(enabled, `${state}.${name}`).toBe(name === expected);
      }
    }
  });

  it('rejects unknown states', () => {
    expect(() => roundControls('limbo' as PanelStateName)).toThrow(/unknown panel state/);
  });
});

describe('currentRound', () => {
  it('follows the consultation phase', () => {
    expect(currentRound('draft')).toBeNull();
    expect(currentRound('round1_open')).toBe(1);
    expect(currentRound('round1_closed')).toBe(1);
    expect(currentRound('round2_open')).toBe(2);
    expect(currentRound('round2_closed')).toBe(2);
    expect(currentRound('finalized')).toBe(2);
  });
});

describe('rendered round controls', () => {
  const ACTION_BY_NAME: Record<string, string> = {
    openRound1: 'open-round-1',
    closeRound1: 'close-round-1',
    openRound2: 'open-round-2',
    closeRound2: 'close-round-2',
    finalize: 'finalize',
  };

  it('buttons match the state gating for all six states', () => {
    for (const state of PANEL_STATES) {
      const html = renderDashboard(model(state));
      for (const [name, action] of Object.entries(ACTION_BY_NAME)) {
        const match = html.match(new RegExp(`<button data-action="${action}"([^>]*)>`));
        expect(match, `${state}: button ${action}`).not.toBeNull();
        const shouldEnable = ENABLED_BY_STATE[state] === name;
        expect(match![1].includes('disabled'), `${state}: ${action} disabled?`).toBe(!shouldEnable);
      }
    }
  });
});

describe('lorenz geometry', () => {
  it('maps (0,0) to the bottom-left and (1,1) to the top-right corner', () => {
    const spec = LORENZ_CHART;
    expect(lorenzPixel([0, 0], spec)).toEqual([spec.pad, spec.height - spec.pad]);
    expect(lorenzPixel([1, 1], spec)).toEqual([spec.width - spec.pad, spec.pad]);
  });

  it('builds a path visiting every point in order', () => {
    const path = lorenzPath(
      [
        [0, 0],
        [0.5, 0.2],
        [1, 1],
      ],
      { width: 100, height: 100, pad: 0 },
    );
    expect(path).toBe('M0,100 L50,80 L100,0');
  });
});

describe('renderDashboard', () => {
  it('prints response rates verbatim from the document', () => {
    const html = renderDashboard(model('round1_open'));
    expect(html).toContain('53.93');
    expect(html).toContain('83.5 (provisional)');
    expect(html).toContain('<td>191</td>');
    expect(html).toContain('<td>103</td>');
    expect(html).toContain('TOTAL');
  });

  it('shows pending finalization instead of concentration before finalize', () => {
    const html = renderDashboard(model('round2_closed'));
    expect(html).toMatch(/pending finalization/i);
    expect(html).not.toContain('<svg');
  });

  it('draws both lorenz curves with endpoints at the chart corners', () => {
    const html = renderDashboard(model('finalized'));
    const spec = LORENZ_CHART;
    const origin = `M${spec.pad},${spec.height - spec.pad}`;
    const corner = `L${spec.width - spec.pad},${spec.pad}`;
    for (const cls of ['lorenz-before', 'lorenz-after']) {
      const match = html.match(new RegExp(`class="${cls}" d="([^"]+)"`));
      expect(match, cls).not.toBeNull();
      expect(match![1].startsWith(origin)).toBe(true);
      expect(match![1].endsWith(corner)).toBe(true);
    }
    expect(html).toContain('Gini before 0.25, after 0.15');
  });

  it('tabulates change stats per scope without reformatting', () => {
    const html = renderDashboard(model('finalized'));
    expect(html).toContain('<td>domestic</td><td>0.25</td><td>0.4330127018922193</td>');
    expect(html).toContain('<td>foreign</td><td>0.5</td><td>0.5</td>');
  });

  it('links the nonrespondent export for the current round', () => {
    const html = renderDashboard(model('round2_open'));
    expect(html).toContain('2 nonrespondents');
    expect(html).toContain('href="/api/panels/panel-history/nonrespondents?round=2"');
  });

  it('notes when no round has started', () => {
    const html = renderDashboard(model('draft'));
    expect(html).toMatch(/No round started yet/);
  });
});

describe('fetchDashboardModel', () => {
  function fakeApi(state: PanelStateName, finalized: boolean) {
    const calls: string[] = [];
    return {
      calls,
      panelSummary: async () => {
        calls.push('summary');
        return panelSummary({ state, finalized });
      },
      responseRates: async () => {
        calls.push('rates');
        return ratesDoc();
      },
      nonrespondents: async (_id: string, round: number) => {
        calls.push(`nonrespondents:${round}`);
        return { panel_id: 'panel-history', round, expert_ids: [] };
      },
      analytics: async () => {
        calls.push('analytics');
        if (!finalized) throw new ApiError(409, 'NOT_FINALIZED', 'panel is not finalized');
        return analyticsDoc();
      },
    };
  }

  it('collects analytics once the panel is finalized', async () => {
    const api = fakeApi('finalized', true);
    const dash = await fetchDashboardModel(api, 'panel-history');
    expect(dash.analytics).not.toBeNull();
    expect(api.calls).toContain('nonrespondents:2');
  });

  it('treats NOT_FINALIZED as analytics-pending, not an error', async () => {
    const api = fakeApi('round1_open', false);
    const dash = await fetchDashboardModel(api, 'panel-history');
    expect(dash.analytics).toBeNull();
    expect(api.calls).toContain('nonrespondents:1');
  });

  it('skips the nonrespondent fetch before any round starts', async () => {
    const api = fakeApi('draft', false);
    const dash = await fetchDashboardModel(api, 'panel-history');
    expect(dash.nonrespondents).toBeNull();
    expect(api.calls.some((c) => c.startsWith('nonrespondents'))).toBe(false);
  });

  it('propagates unexpected errors', async () => {
    const api = fakeApi('round1_open', false);
    api.analytics = async () => {
      throw new ApiError(500, 'STORAGE_UNAVAILABLE', 'store offline');
    };
    await expect(fetchDashboardModel(api, 'panel-history')).rejects.toMatchObject({
      code: 'STORAGE_UNAVAILABLE',
    });
  });
});
