/** Percentages are shown to one decimal; the raw service value is kept on
 * hover via the title attribute, so nothing is lost to display rounding. */

export function pct1(value: number): string {
  return value.toFixed(1);
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
