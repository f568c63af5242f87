/**
 * Display formatting. Numbers render at 4 significant digits everywhere;
 * the untruncated value rides in the title attribute so hovering shows
 * full precision. The UI never computes values, only formats served ones.
 */

export function sig4(x: number | null | undefined): string {
  if (x === null || x === undefined || Number.isNaN(x)) return "n/a";
  if (x === 0) return "0.000";
  const formatted = x.toPrecision(4);
  // toPrecision switches to exponent form on its own past 1e21; force it
  // earlier so table cells stay narrow.
  if (Math.abs(x) >= 1e6 || Math.abs(x) < 1e-4) {
    return x.toExponential(3);
  }
  return formatted;
}

export function fullPrecision(x: number | null | undefined): string {
  if (x === null || x === undefined || Number.isNaN(x)) return "not available";
  return String(x);
}

/** A table cell: 4 significant digits shown, full precision on hover. */
export function numCell(x: number | null | undefined, cls = "num"): string {
  return `<td class="${cls}" title="${fullPrecision(x)}">${sig4(x)}</td>`;
}

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
