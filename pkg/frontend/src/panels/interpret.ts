// Interpret panel: inherent interpretation for glass models.  The run
// controls are disabled, with an explanation, whenever the selected
// model is not interpretable (registered models, score tables); the
// Explain panel stays available for those.

import { hBars, lineChart } from "../charts.js";
import {
  errorBlock, esc, genericValue, kvTable, numText,
} from "../format.js";
import type {
  EffectCurve, GlobalInterpretationDoc, LocalInterpretationDoc, ModelDoc,
  Num, ResultEntry,
} from "../types.js";
import { modelSelect, type Ui } from "./diagnose.js";

function effectChart(e: EffectCurve): string {
  if (e.kind === "categorical") {
    const rows = e.grid.map((level, k) => ({
      label: String(level),
      value: e.value[k] ?? null,
    }));
    return hBars(rows);
  }
  const pts = e.grid.map((g, k) => ({
    x: g as Num,
    y: e.value[k],
    title: `${e.feature} ${g}: ${e.value[k]}`,
  }));
  return lineChart([{ name: e.feature, points: pts }], { height: 150 });
}

function pairEffectTable(p: GlobalInterpretationDoc["pair_effects"][number]): string {
  const ga = p.grid_a ?? [];
  const gb = p.grid_b ?? [];
  const value = p.value ?? [];
  const name = p.features ? p.features.join(" with ") : "pair";
  if (ga.length === 0 || gb.length === 0) {
    return `<details><summary>${esc(name)}</summary>${genericValue(p)}</details>`;
  }
  const head = [""].concat(gb.map((g) => String(g)));
  const rows = ga.map((a, i) => [
    numText(String(a)),
    ...gb.map((_, j) => numText(value[i]?.[j] ?? null)),
  ]);
  const body = rows
    .map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join("")}</tr>`)
    .join("");
  const headHtml = head.map((h) => `<th>${esc(h)}</th>`).join("");
  return `<details><summary>${esc(name)}</summary><div class="scroll">` +
    `<table class="grid"><thead><tr>${headHtml}</tr></thead><tbody>${body}</tbody></table>` +
    `</div></details>`;
}

export function renderGlobalInterpretation(doc: GlobalInterpretationDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["family", esc(doc.family)],
  ]);
  const importance = hBars(doc.importance.map((t) => ({
    label: t.term,
    value: t.value,
    title: `${t.term}: ${t.value}`,
  })));
  const effects = doc.effects
    .map((e) => `<h4>effect of ${esc(e.feature)}</h4>` + effectChart(e))
    .join("");
  const pairs = doc.pair_effects.length
    ? `<h4>pairwise effects</h4>` + doc.pair_effects.map(pairEffectTable).join("")
    : "";
  const summary = `<details><summary>model summary</summary>${genericValue(doc.summary)}</details>`;
  return head + `<h4>term importance</h4>` + importance + effects + pairs + summary;
}

export function renderLocalInterpretation(doc: LocalInterpretationDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["family", esc(doc.family)],
    ["base value", numText(doc.base)],
    ["margin", numText(doc.margin)],
    ["prediction", numText(doc.prediction)],
  ]);
  const bars = hBars(doc.contributions.map((c) => ({
    label: c.term,
    value: c.value,
    title: `${c.term}: ${c.value}`,
  })));
  const path = doc.path
    ? `<details><summary>decision path</summary>${genericValue(doc.path)}</details>`
    : "";
  return head + `<h4>contributions</h4>` + bars + path;
}

export function interpretGate(model: ModelDoc | undefined): string | null {
  if (!model) return null;
  if (model.interpretable) return null;
  return `model '${model.name}' of family '${model.family}' is not inherently ` +
    "interpretable, so this view is disabled for it; the explain panel still " +
    "offers post hoc explanations";
}

export function renderInterpretPanel(models: ModelDoc[], selectedName: string | undefined,
                                     local: boolean, row: string | undefined,
                                     entry: ResultEntry | null, ui: Ui): string {
  const selected = models.find((m) => m.name === selectedName) ?? models[0];
  const gate = interpretGate(selected);
  const disabled = ui.busy || gate !== null;

  const picker = modelSelect(models, selected?.name, () => null);
  const rowValue = row ? ` value="${esc(row)}"` : ' value="0"';
  const form = models.length === 0
    ? '<p class="na">train a model first</p>'
    : `<form data-form="interpret" class="controls">
        <label>model ${picker}</label>
        <label class="check"><input type="checkbox" name="local"${local ? " checked" : ""}${disabled ? " disabled" : ""}> local breakdown</label>
        <label>row <input name="row" data-type="number"${rowValue}${disabled ? " disabled" : ""}></label>
        <button type="submit"${disabled ? " disabled" : ""}>interpret</button>
      </form>` + (gate ? `<p class="gate">${esc(gate)}</p>` : "");

  let body = '<p class="na">not run yet</p>';
  if (entry) {
    if (entry.status !== "ok" || !entry.result) {
      body = errorBlock(entry.error);
    } else if (entry.result.kind === "local_interpretation") {
      body = renderLocalInterpretation(entry.result);
    } else if (entry.result.kind === "global_interpretation") {
      body = renderGlobalInterpretation(entry.result);
    } else {
      body = genericValue(entry.result);
    }
  }

  return `<section class="panel">
    <h2>Interpret</h2>
    ${form}
    <div class="result">${body}</div>
  </section>`;
}
