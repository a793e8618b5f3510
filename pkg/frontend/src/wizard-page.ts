// Questionnaire wizard rendering and the page controller that wires it
// to the gateway. Rendering is a pure function of WizardState so the
// whole flow is scriptable; the controller just re-renders after every
// action and persists the draft.

import { ApiClient, ApiError } from './api.js';
import { applyDraft, clearDraft, saveDraft, type DraftStore } from './draft.js';
import { attr, CATEGORY_LETTERS, escapeHtml, formatCategory } from './html.js';
import {
  carriedItems,
  initWizard,
  submitWizard,
  wizardAdvance,
  wizardPayload,
  type WizardAction,
  type WizardItem,
  type WizardState,
} from './wizard.js';

const STEP_TITLES: Record<string, string> = {
  'select-known': 'Step 1 of 3: publishers you know',
  rescore: 'Step 2 of 3: your new scores',
  confirm: 'Step 3 of 3: confirm and submit',
  done: 'Finished',
};

function errorLine(state: WizardState): string {
  if (!state.error) return '';
  return `<p class="error" role="alert">${escapeHtml(state.error)}</p>`;
}

function categoryCell(item: WizardItem): string {
  const shown = formatCategory(item.displayedNumeric, item.displayedLetter);
  if (item.previousNumeric !== null && item.previousNumeric !== item.displayedNumeric) {
    return `<td class="category changed">${shown} <span class="flag">was ${item.previousNumeric}</span></td>`;
  }
  return `<td class="category">${shown}</td>`;
}

function renderSelectKnown(state: WizardState): string {
  if (state.items.length === 0) {
    return '<p class="notice">There are no publishers on this questionnaire.</p>';
  }
  const rows = state.items
    .map((item) => {
      const name = escapeHtml(item.publisher);
      return `<tr>
        <td>${name}</td>
        <td class="scope">${escapeHtml(item.scope)}</td>
        ${categoryCell(item)}
        <td><input type="checkbox" data-known=${attr(item.publisher)} ${item.known ? 'checked' : ''}
             aria-label="I know ${name}"></td>
        <td><input type="checkbox" data-disagree=${attr(item.publisher)} ${item.disagree ? 'checked' : ''}
             ${item.known ? '' : 'disabled'} aria-label="I disagree about ${name}"></td>
      </tr>`;
    })
    .join('\n');
  return `
    <p>Mark the publishers you know, and tick disagree where the shown
       category does not match your judgement.</p>
    <table class="items">
      <thead><tr><th>Publisher</th><th>Scope</th><th>Category</th><th>Known</th><th>Disagree</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    ${errorLine(state)}
    <div class="actions"><button data-action="next">Next</button></div>`;
}

function scoreOptions(selected: number | null): string {
  const options = ['<option value="">choose</option>'];
  for (const numeric of [4, 3, 2, 1]) {
    const label = formatCategory(numeric, CATEGORY_LETTERS[numeric]);
    options.push(
      `<option value="${numeric}" ${selected === numeric ? 'selected' : ''}>${label}</option>`,
    );
  }
  return options.join('');
}

function renderRescore(state: WizardState): string {
  const rows = carriedItems(state)
    .map(
      (item) => `<tr>
        <td>${escapeHtml(item.publisher)}</td>
        ${categoryCell(item)}
        <td><select data-score=${attr(item.publisher)}>${scoreOptions(item.newScore)}</select></td>
      </tr>`,
    )
    .join('\n');
  return `
    <p>Give your own category to each publisher you disagreed about.</p>
    <table class="items">
      <thead><tr><th>Publisher</th><th>Shown category</th><th>Your score</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    ${errorLine(state)}
    <div class="actions">
      <button data-action="back">Back</button>
      <button data-action="next">Next</button>
    </div>`;
}

function renderConfirm(state: WizardState): string {
  const payload = wizardPayload(state);
  const known = payload.items.length;
  const rescored = carriedItems(state)
    .map(
      (item) =>
        `<li>${escapeHtml(item.publisher)}: ${formatCategory(item.displayedNumeric, item.displayedLetter)}
         &rarr; ${item.newScore} (${CATEGORY_LETTERS[item.newScore ?? 0] ?? '?'})</li>`,
    )
    .join('\n');
  return `
    <p>You marked ${known} publisher${known === 1 ? '' : 's'} as known
       and rescored ${carriedItems(state).length}.</p>
    ${rescored ? `<ul class="summary">${rescored}</ul>` : '<p class="notice">No rescores; a known-only response will be sent.</p>'}
    <label>Suggest publishers missing from the list (comma separated)
      <input type="text" data-suggestions value=${attr(state.suggestions)}>
    </label>
    ${errorLine(state)}
    <div class="actions">
      <button data-action="back">Back</button>
      <button data-action="submit">Submit</button>
    </div>`;
}

function renderDone(state: WizardState): string {
  if (state.outcome === 'round-closed') {
    return `<p class="notice closed-round" role="alert">This round has closed;
      your response was not recorded. Thank you for your time.</p>`;
  }
  const receipt = state.receipt;
  const detail = receipt
    ? `<p>${receipt.items_recorded} item${receipt.items_recorded === 1 ? '' : 's'} recorded
       for round ${receipt.round} at ${escapeHtml(receipt.submitted_at)}.</p>`
    : '';
  return `<p class="notice done-notice">Your response has been recorded. Thank you.</p>${detail}`;
}

export function renderWizard(state: WizardState): string {
  const body = {
    'select-known': renderSelectKnown,
    rescore: renderRescore,
    confirm: renderConfirm,
    done: renderDone,
  }[state.step](state);
  return `
    <section class="wizard" data-step="${state.step}">
      <h1>${escapeHtml(state.field)} consultation, round ${state.round}</h1>
      <h2>${STEP_TITLES[state.step]}</h2>
      ${body}
    </section>`;
}

export function renderWizardError(message: string): string {
  return `<section class="wizard"><p class="error" role="alert">${escapeHtml(message)}</p></section>`;
}

export class WizardPage {
  private state: WizardState | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly token: string,
    private readonly drafts: DraftStore,
  ) {}

  async start(): Promise<void> {
    this.bind();
    try {
      const doc = await this.api.questionnaire(this.token);
      this.state = applyDraft(this.drafts, initWizard(this.token, doc));
      this.render();
    } catch (error) {
      if (error instanceof ApiError && error.code === 'UNKNOWN_TOKEN') {
        this.root.innerHTML = renderWizardError(
          'This questionnaire link is not valid. Please use the link you received by email.',
        );
        return;
      }
      if (error instanceof ApiError && error.code === 'ROUND_CLOSED') {
        this.root.innerHTML = renderWizardError('No consultation round is open right now.');
        return;
      }
      throw error;
    }
  }

  private dispatch(action: WizardAction): void {
    if (!this.state) return;
    this.state = wizardAdvance(this.state, action);
    saveDraft(this.drafts, this.state);
    this.render();
  }

  private async submit(): Promise<void> {
    if (!this.state) return;
    this.state = await submitWizard(this.state, this.api);
    if (this.state.step === 'done') {
      clearDraft(this.drafts, this.token);
    }
    this.render();
  }

  private render(): void {
    if (this.state) this.root.innerHTML = renderWizard(this.state);
  }

  private bind(): void {
    this.root.addEventListener('change', (event) => {
      const target = event.target as HTMLElement;
      const known = target.getAttribute('data-known');
      if (known !== null) return this.dispatch({ kind: 'toggle-known', publisher: known });
      const disagree = target.getAttribute('data-disagree');
      if (disagree !== null) return this.dispatch({ kind: 'toggle-disagree', publisher: disagree });
      const score = target.getAttribute('data-score');
      if (score !== null) {
        const raw = (target as HTMLSelectElement).value;
        return this.dispatch({
          kind: 'set-score',
          publisher: score,
          score: raw === '' ? null : Number(raw),
        });
      }
      if (target.hasAttribute('data-suggestions')) {
        return this.dispatch({
          kind: 'set-suggestions',
          text: (target as HTMLInputElement).value,
        });
      }
    });
    this.root.addEventListener('click', (event) => {
      const target = (event.target as HTMLElement).closest('button[data-action]');
      if (!target) return;
      const action = target.getAttribute('data-action');
      if (action === 'next') this.dispatch({ kind: 'next' });
      else if (action === 'back') this.dispatch({ kind: 'back' });
      else if (action === 'submit') void this.submit();
    });
  }
}
