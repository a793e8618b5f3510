// Two-page questionnaire wizard. Page one marks the publishers the
// expert knows and the displayed categories they disagree with; page
// two rescores exactly the disagreed ones; a confirm step shows what
// will be sent. With nothing disagreed the rescore page is skipped and
// a known-only response goes out.
//
// wizardAdvance is a pure reducer. The submit round-trip happens in
// submitWizard, which feeds the outcome back in as an action: a 200
// lands on Done, a 409 ROUND_CLOSED replaces Done with the closed-round
// notice, anything else stays on Confirm with the error inline.

import { ApiClient, ApiError } from './api.js';
import type { QuestionnaireDoc, SubmitPayload, SubmitReceipt } from './types.js';
import { firstItemError, itemError } from './validate.js';

export type WizardStep = 'select-known' | 'rescore' | 'confirm' | 'done';

export type WizardOutcome = 'submitted' | 'round-closed';

export interface WizardItem {
  publisher: string;
  scope: string;
  displayedNumeric: number;
  displayedLetter: string;
  previousNumeric: number | null;
  known: boolean;
  disagree: boolean;
  newScore: number | null;
}

export interface WizardState {
  token: string;
  panelId: string;
  field: string;
  expertId: string;
  round: number;
  step: WizardStep;
  items: WizardItem[];
  suggestions: string;
  error: string | null;
  outcome: WizardOutcome | null;
  receipt: SubmitReceipt | null;
}

export type WizardAction =
  | { kind: 'toggle-known'; publisher: string }
  | { kind: 'toggle-disagree'; publisher: string }
  | { kind: 'set-score'; publisher: string; score: number | null }
  | { kind: 'set-suggestions'; text: string }
  | { kind: 'next' }
  | { kind: 'back' }
  | { kind: 'submit-ok'; receipt: SubmitReceipt }
  | { kind: 'submit-error'; code: string; message: string };

export function initWizard(token: string, doc: QuestionnaireDoc): WizardState {
  return {
    token,
    panelId: doc.panel_id,
    field: doc.field,
    expertId: doc.expert_id,
    round: doc.round,
    step: 'select-known',
    items: doc.items.map((item) => ({
      publisher: item.publisher,
      scope: item.scope,
      displayedNumeric: item.displayed_numeric,
      displayedLetter: item.displayed_letter,
      previousNumeric: item.previous_numeric,
      known: false,
      disagree: false,
      newScore: null,
    })),
    suggestions: '',
    error: null,
    outcome: null,
    receipt: null,
  };
}

// The rescore page lists exactly the items marked known and disagreed.
export function carriedItems(state: WizardState): WizardItem[] {
  return state.items.filter((item) => item.known && item.disagree);
}

function blocked(state: WizardState, message: string): WizardState {
  return { ...state, error: message };
}

function updateItem(
  state: WizardState,
  publisher: string,
  update: (item: WizardItem) => WizardItem,
): WizardState {
  if (!state.items.some((item) => item.publisher === publisher)) {
    return blocked(state, `${publisher} is not on this questionnaire`);
  }
  return {
    ...state,
    error: null,
    items: state.items.map((item) => (item.publisher === publisher ? update(item) : item)),
  };
}

export function wizardAdvance(state: WizardState, action: WizardAction): WizardState {
  switch (action.kind) {
    case 'toggle-known': {
      if (state.step !== 'select-known') {
        return blocked(state, 'known marks can only change on the first page');
      }
      return updateItem(state, action.publisher, (item) =>
        item.known
          ? { ...item, known: false, disagree: false, newScore: null }
          : { ...item, known: true },
      );
    }

    case 'toggle-disagree': {
      if (state.step !== 'select-known') {
        return blocked(state, 'disagree marks can only change on the first page');
      }
      const target = state.items.find((item) => item.publisher === action.publisher);
      if (target && !target.known && !target.disagree) {
        return blocked(state, `${action.publisher}: mark the publisher as known before disagreeing`);
      }
      return updateItem(state, action.publisher, (item) =>
        item.disagree ? { ...item, disagree: false, newScore: null } : { ...item, disagree: true },
      );
    }

    case 'set-score': {
      if (state.step !== 'rescore') {
        return blocked(state, 'scores can only change on the rescore page');
      }
      const target = state.items.find((item) => item.publisher === action.publisher);
      if (target && !(target.known && target.disagree)) {
        return blocked(state, `${action.publisher} is not marked for rescoring`);
      }
      return updateItem(state, action.publisher, (item) => ({ ...item, newScore: action.score }));
    }

    case 'set-suggestions': {
      if (state.step === 'done') return state;
      return { ...state, suggestions: action.text, error: null };
    }

    case 'next': {
      if (state.step === 'select-known') {
        const next = carriedItems(state).length > 0 ? 'rescore' : 'confirm';
        return { ...state, step: next, error: null };
      }
      if (state.step === 'rescore') {
        const invalid = firstItemError(carriedItems(state));
        if (invalid) return blocked(state, invalid);
        return { ...state, step: 'confirm', error: null };
      }
      if (state.step === 'confirm') {
        return blocked(state, 'review the summary and press submit');
      }
      return blocked(state, 'the questionnaire is already complete');
    }

    case 'back': {
      if (state.step === 'rescore') {
        return { ...state, step: 'select-known', error: null };
      }
      if (state.step === 'confirm') {
        const previous = carriedItems(state).length > 0 ? 'rescore' : 'select-known';
        return { ...state, step: previous, error: null };
      }
      return blocked(state, 'there is no earlier page to return to');
    }

    case 'submit-ok': {
      return {
        ...state,
        step: 'done',
        outcome: 'submitted',
        receipt: action.receipt,
        error: null,
      };
    }

    case 'submit-error': {
      if (action.code === 'ROUND_CLOSED') {
        return { ...state, step: 'done', outcome: 'round-closed', error: action.message };
      }
      return blocked(state, action.message);
    }
  }
}

export function parseSuggestions(text: string): string[] {
  return text
    .split(',')
    .map((name) => name.trim())
    .filter((name) => name.length > 0);
}

// Only known publishers travel; a score goes along only with a
// disagreement, so the payload cannot violate the server's item rules.
export function wizardPayload(state: WizardState): SubmitPayload {
  return {
    items: state.items
      .filter((item) => item.known)
      .map((item) => ({
        publisher: item.publisher,
        known: true,
        disagree: item.disagree,
        new_score: item.disagree ? item.newScore : null,
      })),
    suggested_publishers: parseSuggestions(state.suggestions),
  };
}

export type SubmitTransport = Pick<ApiClient, 'submit'>;

export async function submitWizard(state: WizardState, api: SubmitTransport): Promise<WizardState> {
  if (state.step !== 'confirm') {
    return blocked(state, 'nothing is ready to submit');
  }
  const payload = wizardPayload(state);
  const invalid = payload.items
    .map((item) =>
      itemError({
        publisher: item.publisher,
        known: item.known,
        disagree: item.disagree,
        newScore: item.new_score,
      }),
    )
    .find((error) => error !== null);
  if (invalid) return blocked(state, invalid);
  try {
    const receipt = await api.submit(state.token, payload);
    return wizardAdvance(state, { kind: 'submit-ok', receipt });
  } catch (error) {
    if (error instanceof ApiError) {
      return wizardAdvance(state, { kind: 'submit-error', code: error.code, message: error.message });
    }
    throw error;
  }
}
