/** Presentation helpers. Thresholds are display bands only; the underlying
 * numbers always come from the API unchanged. */

export type Band = "low" | "medium" | "high";

// low < 40%, medium 40-70%, high > 70%
export const BAND_THRESHOLDS = { low: 0.4, medium: 0.7 };

export function reliabilityBand(reliability: number): Band {
  if (reliability < BAND_THRESHOLDS.low) return "low";
  if (reliability <= BAND_THRESHOLDS.medium) return "medium";
  return "high";
}

/** Render a fraction as a percentage with one decimal dropped when exact,
 * e.g. 0.325 -> "32.5%", 0.66 -> "66%". */
export function percent(value: number): string {
  const v = value * 100;
  const rounded = Math.round(v * 10) / 10;
  return `${Number.isInteger(rounded) ? rounded.toFixed(0) : rounded.toFixed(1)}%`;
}

export function signedPercent(delta: number): string {
  const p = percent(Math.abs(delta));
  if (delta > 0) return `+${p}`;
  if (delta < 0) return `−${p}`;
  return `±0%`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
