/** Sentence display helpers: ASCII grammar with an optional symbol toggle. */

const REPLACEMENTS: [RegExp, string][] = [
  [/->/g, "→"], // →
  [/&/g, "∧"], // ∧
  [/\|/g, "∨"], // ∨
  [/!/g, "¬"], // ¬
];

export function prettySentence(ascii: string): string {
  let out = ascii;
  for (const [pattern, symbol] of REPLACEMENTS) {
    out = out.replace(pattern, symbol);
  }
  return out;
}

export function displaySentence(ascii: string, pretty: boolean): string {
  return pretty ? prettySentence(ascii) : ascii;
}

export function formatDiagnosis(components: string[]): string {
  return `{${components.join(", ")}}`;
}

export function formatPercent(probability: number): string {
  return `${(probability * 100).toFixed(1)}%`;
}

export function formatScore(value: number, digits = 4): string {
  return value.toFixed(digits);
}
