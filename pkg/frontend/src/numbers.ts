// Number-literal tokenizer shared by the fidelity tests and the charts.

// A standalone numeric literal: not glued to an identifier (x1, job-3,
// hex hashes) and not a fragment of a longer literal.
const NUM_TOKEN = /(?<![\w.+-])-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?(?![\w.])/g;

export function numberTokens(text: string): string[] {
  return text.match(NUM_TOKEN) ?? [];
}

export function stripTags(html: string): string {
  return html.replace(/<[^>]*>/g, " ");
}

export function asFloat(raw: string | null | undefined): number {
  if (raw == null) return NaN;
  return Number(raw);
}
