// Small HTML helpers shared by the wizard and dashboard renderers.

const ESCAPES: Record<string, string> = {
  '&': '&amp;',
  '<': '&lt;',
  '>': '&gt;',
  '"': '&quot;',
  "'": '&#39;',
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => ESCAPES[c]);
}

// Questionnaire vocabulary: category 4 is the top band (letter A).
export const CATEGORY_LETTERS: Record<number, string> = { 1: 'D', 2: 'C', 3: 'B', 4: 'A' };

// Categories render as numeric plus letter, e.g. "3 (B)".
export function formatCategory(numeric: number, letter: string): string {
  return `${numeric} (${letter})`;
}

export function attr(value: string): string {
  return `"${escapeHtml(value)}"`;
}
