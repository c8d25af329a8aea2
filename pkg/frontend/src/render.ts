/** Pure view functions: state in, HTML string out. Keeping these free of DOM
 * access makes them directly testable and guarantees the displayed numbers
 * are exactly the API's numbers. */

import type { FeatureInfo, Prediction, RuleAssessment, Scheme } from "./api.js";
import { escapeHtml, percent, reliabilityBand, signedPercent } from "./format.js";

export interface RuleRowView {
  text: string;
  output: 0 | 1;
  prc: number;
  delta: number | null; // vs baseline PRC, null when no baseline or new rule
}

/** Rows ordered by descending PRC; ties keep the API's rule order. */
export function ruleRows(
  prediction: Prediction,
  baseline: Prediction | null,
): RuleRowView[] {
  const baseByText = new Map<string, RuleAssessment>();
  if (baseline) {
    for (const r of baseline.rules) baseByText.set(r.text, r);
  }
  return prediction.rules
    .map((r, i) => ({ r, i }))
    .sort((a, b) => b.r.prc - a.r.prc || a.i - b.i)
    .map(({ r }) => {
      const base = baseByText.get(r.text);
      return {
        text: r.text,
        output: r.output,
        prc: r.prc,
        delta: baseline && base ? r.prc - base.prc : null,
      };
    });
}

export function renderRuleTable(rows: RuleRowView[]): string {
  const body = rows
    .map((row) => {
      const vote = row.output === 1 ? "for" : "against";
      const delta =
        row.delta === null
          ? ""
          : `<span class="delta ${row.delta === 0 ? "same" : row.delta > 0 ? "up" : "down"}">${signedPercent(row.delta)}</span>`;
      return (
        `<tr class="rule-row vote-${vote}">` +
        `<td class="rule-text">${escapeHtml(row.text)}</td>` +
        `<td class="rule-output"><span class="badge output-${row.output}">${vote}</span></td>` +
        `<td class="rule-prc">${percent(row.prc)}${delta}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<table class="rules"><thead><tr>` +
    `<th>Rule</th><th>Vote</th><th>Estimated correctness</th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

export function renderOutcome(prediction: Prediction): string {
  const band = reliabilityBand(prediction.reliability);
  return (
    `<div class="outcome">` +
    `<div class="gauge probability">` +
    `<span class="label">Predicted probability</span>` +
    `<span class="value">${percent(prediction.probability)}</span>` +
    `</div>` +
    `<div class="gauge reliability band-${band}">` +
    `<span class="label">Reliability</span>` +
    `<span class="value">${percent(prediction.reliability)}</span>` +
    `<span class="badge band">${band}</span>` +
    `</div>` +
    (prediction.unanimous ? `<div class="note">All rules agree on this patient.</div>` : "") +
    `<div class="scheme-note">scheme: ${prediction.scheme}</div>` +
    `</div>`
  );
}

export function renderForm(
  features: FeatureInfo[],
  values: Record<string, number | "">,
): string {
  const fields = features
    .map((f) => {
      const v = values[f.name];
      const step = f.kind === "categorical-ordinal" ? "1" : "any";
      return (
        `<label class="field">` +
        `<span class="name">${escapeHtml(f.name)}</span>` +
        `<input type="number" name="${escapeHtml(f.name)}" step="${step}"` +
        ` value="${v === "" || v === undefined ? "" : v}"` +
        ` data-min="${f.min}" data-max="${f.max}" />` +
        `<span class="hint">seen ${f.min}–${f.max}</span>` +
        `</label>`
      );
    })
    .join("");
  return `<div class="patient-form">${fields}</div>`;
}

export function renderSchemeSelector(current: Scheme): string {
  const schemes: Scheme[] = ["personalized", "weighted", "non_weighted"];
  const options = schemes
    .map(
      (s) =>
        `<option value="${s}"${s === current ? " selected" : ""}>${s.replace("_", " ")}</option>`,
    )
    .join("");
  return `<select id="scheme">${options}</select>`;
}

export function renderError(message: string): string {
  return `<div class="error">${escapeHtml(message)}</div>`;
}

/** Out-of-range values are allowed (the ranges are hints, not limits) but
 * called out so unit mistakes are easy to spot. */
export function rangeWarnings(
  features: FeatureInfo[],
  values: Record<string, number | "">,
): string[] {
  const warnings: string[] = [];
  for (const f of features) {
    const v = values[f.name];
    if (typeof v !== "number") continue;
    if (v < f.min || v > f.max) {
      warnings.push(`${f.name} = ${v} is outside the range seen in training (${f.min}–${f.max})`);
    }
  }
  return warnings;
}
