// Optimistic local draft: toggles and scores are kept in browser
// storage keyed by token, so an interrupted expert resumes where they
// left off. Only submitted responses ever reach the server.

import type { WizardState } from './wizard.js';

export interface DraftDoc {
  round: number;
  suggestions: string;
  items: Record<string, { known: boolean; disagree: boolean; newScore: number | null }>;
}

export interface DraftStore {
  get(key: string): string | null;
  set(key: string, value: string): void;
  remove(key: string): void;
}

export function memoryDraftStore(): DraftStore {
  const entries = new Map<string, string>();
  return {
    get: (key) => entries.get(key) ?? null,
    set: (key, value) => void entries.set(key, value),
    remove: (key) => void entries.delete(key),
  };
}

export function browserDraftStore(storage: Storage): DraftStore {
  return {
    get: (key) => storage.getItem(key),
    set: (key, value) => {
      try {
        storage.setItem(key, value);
      } catch {
        // storage full or blocked; drafts are best-effort
      }
    },
    remove: (key) => storage.removeItem(key),
  };
}

export function draftKey(token: string): string {
  return `delphirank-draft-${token}`;
}

export function saveDraft(store: DraftStore, state: WizardState): void {
  const doc: DraftDoc = {
    round: state.round,
    suggestions: state.suggestions,
    items: Object.fromEntries(
      state.items.map((item) => [
        item.publisher,
        { known: item.known, disagree: item.disagree, newScore: item.newScore },
      ]),
    ),
  };
  store.set(draftKey(state.token), JSON.stringify(doc));
}

export function clearDraft(store: DraftStore, token: string): void {
  store.remove(draftKey(token));
}

// Reapplies a stored draft when it matches the fetched questionnaire
// (same round, no unknown publishers); stale drafts are dropped.
export function applyDraft(store: DraftStore, state: WizardState): WizardState {
  const raw = store.get(draftKey(state.token));
  if (raw === null) return state;
  let doc: DraftDoc;
  try {
    doc = JSON.parse(raw);
  } catch {
    store.remove(draftKey(state.token));
    return state;
  }
  const publishers = new Set(state.items.map((item) => item.publisher));
  const compatible =
    doc.round === state.round &&
    doc.items !== undefined &&
    Object.keys(doc.items).every((publisher) => publishers.has(publisher));
  if (!compatible) {
    store.remove(draftKey(state.token));
    return state;
  }
  return {
    ...state,
    suggestions: doc.suggestions ?? '',
    items: state.items.map((item) => {
      const saved = doc.items[item.publisher];
      if (!saved) return item;
      const known = Boolean(saved.known);
      const disagree = known && Boolean(saved.disagree);
      return {
        ...item,
        known,
        disagree,
        newScore: disagree ? saved.newScore : null,
      };
    }),
  };
}
