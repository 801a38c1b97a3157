// Explain panel: post hoc explainers that only need predictions, so
// they work for registered models too (score tables excepted: they
// cannot score the perturbed or synthetic rows the explainers build).

import { hBars, histogram, lineChart } from "../charts.js";
import {
  errorBlock, esc, genericValue, kvTable, numText, table,
} from "../format.js";
import type {
  AleDoc, LimeDoc, ModelDoc, Num, PdpDoc, PfiDoc, ResultEntry, ShapDoc,
} from "../types.js";
import { modelSelect, type Ui } from "./diagnose.js";

export const EXPLAIN_METHODS = ["pfi", "pdp", "ale", "lime", "shap"];

// form fields per method; blank inputs are omitted from the request
const METHOD_FIELDS: Record<string, string> = {
  pfi: `
    <label>repeats <input name="repeats" data-type="number" step="any" value="10"></label>
    <label>metric <input name="metric" data-type="text"></label>`,
  pdp: `
    <label>features (one or two, comma separated) <input name="features" data-type="csv"></label>
    <label>grid points <input name="grid" data-type="number" step="any"></label>`,
  ale: `
    <label>feature <input name="feature" data-type="text"></label>
    <label>bins <input name="bins" data-type="number" step="any"></label>`,
  lime: `
    <label>row <input name="row" data-type="number" step="any" value="0"></label>
    <label>samples <input name="samples" data-type="number" step="any"></label>`,
  shap: `
    <label>row <input name="row" data-type="number" step="any" value="0"></label>
    <label>background rows <input name="background" data-type="number" step="any"></label>`,
};

export function renderPfiResult(doc: PfiDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["metric", esc(doc.metric)],
    ["baseline", numText(doc.baseline)],
    ["repeats", numText(doc.repeats)],
    ["seed", numText(doc.seed)],
  ]);
  const bars = hBars(doc.features.map((f) => ({
    label: f.feature,
    value: f.mean,
    title: `${f.feature}: mean ${f.mean}, sd ${f.sd}`,
  })));
  return head + `<h4>permutation importance</h4>` + bars;
}

export function renderPdpResult(doc: PdpDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["features", esc(doc.features.join(", "))],
  ]);
  if (doc.grid_a && doc.grid_b) {
    const value = doc.value as Num[][];
    const headRow = [""].concat(doc.grid_b.map(String)).map((h) => `<th>${esc(h)}</th>`).join("");
    const body = doc.grid_a.map((a, i) =>
      `<tr><td>${numText(a)}</td>${doc.grid_b!
        .map((_, j) => `<td>${numText(value[i]?.[j] ?? null)}</td>`)
        .join("")}</tr>`,
    ).join("");
    return head + `<div class="scroll"><table class="grid">` +
      `<thead><tr>${headRow}</tr></thead><tbody>${body}</tbody></table></div>`;
  }
  const grid = doc.grid ?? [];
  const value = doc.value as Num[];
  if (doc.feature_kind === "categorical") {
    const rows = grid.map((g, k) => ({ label: String(g), value: value[k] ?? null }));
    return head + hBars(rows);
  }
  const pts = grid.map((g, k) => ({
    x: g as Num,
    y: value[k],
    title: `${doc.features[0]} ${g}: ${value[k]}`,
  }));
  return head + lineChart([{ name: doc.features.join(", "), points: pts }]);
}

export function renderAleResult(doc: AleDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["feature", esc(doc.feature)],
  ]);
  const pts = doc.value.map((v, k) => ({
    x: doc.edges[k + 1],
    y: v,
    title: `${doc.edges[k]} to ${doc.edges[k + 1]}: ${v} (rows ${doc.count[k]})`,
  }));
  const chart = lineChart([{ name: doc.feature, points: pts }]);
  return head + chart + `<h4>rows per bin</h4>` + histogram(doc.edges, doc.count);
}

export function renderLimeResult(doc: LimeDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["samples", numText(doc.samples)],
    ["kernel width", numText(doc.kernel_width)],
    ["intercept", numText(doc.intercept)],
    ["fit quality", numText(doc.r2)],
    ["seed", numText(doc.seed)],
  ]);
  const bars = hBars(doc.features.map((f) => ({
    label: f.feature,
    value: f.coefficient,
    title: `${f.feature}: ${f.coefficient}`,
  })));
  return head + `<h4>local surrogate coefficients</h4>` + bars;
}

export function renderShapResult(doc: ShapDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["mode", esc(doc.mode)],
    ["base value", numText(doc.base)],
    ["prediction", numText(doc.prediction)],
    ["background rows", numText(doc.background)],
    ["seed", numText(doc.seed)],
  ]);
  const bars = hBars(doc.values.map((v) => ({
    label: v.feature,
    value: v.value,
    title: `${v.feature}: ${v.value}`,
  })));
  return head + `<h4>attributions</h4>` + bars;
}

export function renderExplainEntry(entry: ResultEntry): string {
  if (entry.status !== "ok" || !entry.result) return errorBlock(entry.error);
  const doc = entry.result;
  switch (doc.kind) {
    case "pfi": return renderPfiResult(doc);
    case "pdp": return renderPdpResult(doc);
    case "ale": return renderAleResult(doc);
    case "lime": return renderLimeResult(doc);
    case "shap": return renderShapResult(doc);
    default: return genericValue(doc);
  }
}

export function renderExplainPanel(models: ModelDoc[], selectedName: string | undefined,
                                   method: string, entry: ResultEntry | null,
                                   ui: Ui): string {
  const activeMethod = EXPLAIN_METHODS.includes(method) ? method : "pfi";
  const picker = modelSelect(models, selectedName, (m) =>
    m.evaluable ? null : `model '${m.name}' cannot score fresh rows, so explainers cannot probe it`,
  );
  const methodOpts = EXPLAIN_METHODS.map((m) =>
    `<option value="${esc(m)}"${m === activeMethod ? " selected" : ""}>${esc(m)}</option>`,
  ).join("");
  const form = models.length === 0
    ? '<p class="na">train or register a model first</p>'
    : `<form data-form="explain" class="controls">
        <label>model ${picker}</label>
        <label>method <select name="method" data-bind="method">${methodOpts}</select></label>
        ${METHOD_FIELDS[activeMethod]}
        <button type="submit"${ui.busy ? " disabled" : ""}>run ${esc(activeMethod)}</button>
      </form>`;

  const body = entry ? renderExplainEntry(entry) : '<p class="na">not run yet</p>';
  return `<section class="panel">
    <h2>Explain</h2>
    ${form}
    <div class="result">${body}</div>
  </section>`;
}
