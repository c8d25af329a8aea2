/** DOM wiring: reads the schema, builds the form, and re-renders on every
 * store update. All arithmetic happens server-side. */

import {
  type FeatureInfo,
  type Scheme,
  fetchModel,
  fetchSchema,
} from "./api.js";
import {
  rangeWarnings,
  renderError,
  renderForm,
  renderOutcome,
  renderRuleTable,
  renderSchemeSelector,
  ruleRows,
} from "./render.js";
import { PredictionStore } from "./state.js";

const fetchFn = window.fetch.bind(window);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function readForm(
  features: FeatureInfo[],
  container: HTMLElement,
): { values: Record<string, number | "">; complete: boolean } {
  const values: Record<string, number | ""> = {};
  let complete = true;
  for (const f of features) {
    const input = container.querySelector<HTMLInputElement>(
      `input[name="${CSS.escape(f.name)}"]`,
    );
    const raw = input?.value.trim() ?? "";
    if (raw === "" || !Number.isFinite(Number(raw))) {
      values[f.name] = "";
      complete = false;
    } else {
      values[f.name] = Number(raw);
    }
  }
  return { values, complete };
}

async function start(): Promise<void> {
  const [schema, model] = await Promise.all([
    fetchSchema(fetchFn),
    fetchModel(fetchFn),
  ]);
  const features = schema.features;
  const store = new PredictionStore(fetchFn);
  let scheme: Scheme = "personalized";
  let hasBaseline = false;

  el("form-area").innerHTML = renderForm(features, {});
  el("scheme-area").innerHTML = renderSchemeSelector(scheme);
  el("model-flags").textContent = model.flags.join("; ");

  const rerender = (): void => {
    const s = store.snapshot;
    el("status").textContent = s.pending ? "scoring…" : "";
    el("error-area").innerHTML = s.error ? renderError(s.error) : "";
    if (s.current) {
      el("outcome-area").innerHTML = renderOutcome(s.current);
      el("rules-area").innerHTML = renderRuleTable(
        ruleRows(s.current, s.baseline !== s.current ? s.baseline : null),
      );
      (el("revert") as HTMLButtonElement).disabled =
        !s.baseline || s.current === s.baseline;
    }
  };
  store.subscribe(rerender);

  const submit = (asBaseline: boolean): void => {
    const { values, complete } = readForm(features, el("form-area"));
    if (!complete) {
      el("error-area").innerHTML = renderError(
        "every feature needs a numeric value",
      );
      return;
    }
    el("warnings-area").innerHTML = rangeWarnings(features, values)
      .map(renderError)
      .join("");
    if (asBaseline) hasBaseline = true;
    void store.submit(values as Record<string, number>, scheme, asBaseline);
  };

  el("score").addEventListener("click", () => {
    submit(true);
  });
  // editing any field after the first score is a what-if, one request per edit
  el("form-area").addEventListener("change", () => {
    if (hasBaseline) submit(false);
  });
  el("scheme-area").addEventListener("change", (ev) => {
    scheme = (ev.target as HTMLSelectElement).value as Scheme;
    if (hasBaseline) submit(true); // new scheme, new reference point
  });
  el("revert").addEventListener("click", () => {
    store.revertToBaseline();
  });
  el("new-patient").addEventListener("click", () => {
    hasBaseline = false;
    store.reset();
    el("form-area").innerHTML = renderForm(features, {});
    el("outcome-area").innerHTML = "";
    el("rules-area").innerHTML = "";
    el("warnings-area").innerHTML = "";
  });
}

void start().catch((err) => {
  document.body.innerHTML = renderError(
    `failed to load the model service: ${String(err)}`,
  );
});
