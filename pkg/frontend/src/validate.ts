// Client-side mirror of the server's response-item rules. The wizard
// validates before sending so a well-behaved session never triggers a
// 400; the server remains authoritative either way.

export interface ItemDraft {
  publisher: string;
  known: boolean;
  disagree: boolean;
  newScore: number | null;
}

export function itemError(item: ItemDraft): string | null {
  if (item.disagree && !item.known) {
    return `${item.publisher}: mark the publisher as known before disagreeing`;
  }
  if (item.disagree && item.newScore === null) {
    return `${item.publisher}: a new score is required when disagreeing`;
  }
  if (!item.disagree && item.newScore !== null) {
    return `${item.publisher}: a new score is only allowed with a disagreement`;
  }
  if (item.newScore !== null && (!Number.isInteger(item.newScore) || item.newScore < 1 || item.newScore > 4)) {
    return `${item.publisher}: the score must be a whole number between 1 and 4`;
  }
  return null;
}

export function firstItemError(items: ItemDraft[]): string | null {
  for (const item of items) {
    const error = itemError(item);
    if (error) return error;
  }
  return null;
}
