import { describe, expect, it } from 'vitest';

import { firstItemError, itemError, type ItemDraft } from '../src/validate.js';

function draft(overrides: Partial<ItemDraft>): ItemDraft {
  return { publisher: 'Springer', known: false, disagree: false, newScore: null, ...overrides };
}

describe('itemError', () => {
  it('accepts the four legal shapes', () => {
    expect(itemError(draft({}))).toBeNull();
    expect(itemError(draft({ known: true }))).toBeNull();
    expect(itemError(draft({ known: true, disagree: true, newScore: 1 }))).toBeNull();
    expect(itemError(draft({ known: true, disagree: true, newScore: 4 }))).toBeNull();
  });

  it('rejects disagreement about an unknown publisher', () => {
    expect(itemError(draft({ disagree: true, newScore: 3 }))).toMatch(/known before disagreeing/);
  });

  it('rejects a disagreement without a score', () => {
    expect(itemError(draft({ known: true, disagree: true }))).toMatch(/new score is required/);
  });

  it('rejects a score without a disagreement', () => {
    expect(itemError(draft({ known: true, newScore: 2 }))).toMatch(/only allowed with a disagreement/);
  });

  it('rejects out-of-range and fractional scores', () => {
    for (const score of [0, 5, -1, 2.5]) {
      const error = itemError(draft({ known: true, disagree: true, newScore: score }));
      expect(error).toMatch(/between 1 and 4/);
    }
  });

  it('names the offending publisher', () => {
    expect(itemError(draft({ disagree: true, newScore: 3 }))).toMatch(/^Springer:/);
  });
});

describe('firstItemError', () => {
  it('returns null for an all-valid list', () => {
    expect(firstItemError([draft({}), draft({ known: true })])).toBeNull();
  });

  it('returns the first failure in order', () => {
    const items = [
      draft({ known: true }),
      draft({ publisher: 'Brill', known: true, disagree: true }),
      draft({ publisher: 'Routledge', disagree: true, newScore: 9 }),
    ];
    expect(firstItemError(items)).toMatch(/^Brill:/);
  });
});
