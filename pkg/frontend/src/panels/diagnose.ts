// Diagnose panel: one tab per diagnostic test, a parameter form, and a
// renderer for each stored result kind.  All figures are response
// literals; static copy stays free of digits so nothing the panel shows
// can be mistaken for an engine number.

import { hBars, lineChart } from "../charts.js";
import {
  errorBlock, esc, genericValue, kvTable, numText, rangeText, table, yesNo,
} from "../format.js";
import type {
  AccuracyDoc, FairnessDoc, ModelDoc, OverfitDoc, ReliabilityDoc,
  ResilienceCurvePoint, ResilienceDoc, ResultDoc, ResultEntry,
  RobustnessDoc, WeakspotDoc,
} from "../types.js";

export interface Ui {
  busy: boolean;
}

interface Field {
  name: string;
  type: "number" | "text" | "csv" | "numcsv" | "select";
  value?: string;
  options?: string[];
  label?: string;
}

export const DIAGNOSTIC_FORMS: Record<string, Field[]> = {
  accuracy: [
    { name: "threshold", type: "number", value: "0.5" },
  ],
  weakspot: [
    { name: "features", type: "csv", label: "features (one or two, comma separated)" },
    { name: "binning", type: "select", options: ["quantile", "uniform"] },
    { name: "bins", type: "number", value: "10" },
    { name: "threshold", type: "number", value: "1.1" },
    { name: "min_samples", type: "number" },
  ],
  overfit: [
    { name: "features", type: "csv", label: "features (one or two, comma separated)" },
    { name: "binning", type: "select", options: ["quantile", "uniform"] },
    { name: "bins", type: "number", value: "10" },
    { name: "delta", type: "number" },
    { name: "min_samples", type: "number" },
  ],
  reliability: [
    { name: "alpha", type: "number", value: "0.1" },
    { name: "calib_ratio", type: "number", value: "0.2" },
    { name: "seed", type: "number" },
  ],
  robustness: [
    { name: "lambdas", type: "numcsv", value: "0.0,0.1,0.2,0.3,0.4" },
    { name: "repeats", type: "number", value: "10" },
    { name: "features", type: "csv" },
    { name: "metric", type: "text" },
    { name: "threshold", type: "number" },
  ],
  resilience: [
    { name: "scenario", type: "select", options: ["all", "worst-sample", "outer-sample", "worst-cluster"] },
    { name: "ratios", type: "numcsv" },
    { name: "k", type: "number" },
    { name: "min_rows", type: "number" },
    { name: "seed", type: "number" },
  ],
  fairness: [
    { name: "protected", type: "text" },
    { name: "reference", type: "text" },
    { name: "favorable_threshold", type: "number", value: "0.5" },
    { name: "segment_feature", type: "text" },
    { name: "segment_bins", type: "number" },
    { name: "min_group", type: "number" },
    { name: "protected_bins", type: "number" },
    { name: "frontier_steps", type: "number" },
  ],
};

export const DIAGNOSTIC_TABS = Object.keys(DIAGNOSTIC_FORMS);

function fieldHtml(f: Field): string {
  const label = f.label ?? f.name.replace(/_/g, " ");
  if (f.type === "select") {
    const opts = (f.options ?? [])
      .map((o) => `<option value="${esc(o)}">${esc(o)}</option>`)
      .join("");
    return `<label>${esc(label)} <select name="${esc(f.name)}" data-type="text">${opts}</select></label>`;
  }
  const step = f.type === "number" ? ' step="any"' : "";
  const value = f.value ? ` value="${esc(f.value)}"` : "";
  return `<label>${esc(label)} <input name="${esc(f.name)}" data-type="${f.type}"${step}${value}></label>`;
}

export function modelSelect(models: ModelDoc[], selected: string | undefined,
                            disable: (m: ModelDoc) => string | null): string {
  const opts = models.map((m) => {
    const why = disable(m);
    const sel = m.name === selected ? " selected" : "";
    const dis = why ? ` disabled title="${esc(why)}"` : "";
    return `<option value="${esc(m.name)}"${sel}${dis}>${esc(m.name)} (${esc(m.family)})</option>`;
  });
  return `<select name="model" data-bind="model">${opts.join("")}</select>`;
}

// -- result renderers --------------------------------------------------------

export function renderAccuracyResult(doc: AccuracyDoc): string {
  const splits = Object.keys(doc.splits).sort();
  const metrics = Array.from(
    new Set(splits.flatMap((s) => Object.keys(doc.splits[s]))),
  ).sort();
  const rows = metrics.map((mn) => [
    esc(mn),
    ...splits.map((s) => numText(doc.splits[s][mn] ?? null)),
  ]);
  return kvTable([
    ["model", esc(doc.model)],
    ["decision threshold", numText(doc.threshold)],
  ]) + table(["metric", ...splits], rows);
}

export function renderWeakspotResult(doc: WeakspotDoc): string {
  const twoD = doc.features.length > 1;
  const head = kvTable([
    ["model", esc(doc.model)],
    ["features", esc(doc.features.join(", "))],
    ["binning", esc(doc.binning)],
    ["bins", numText(doc.bins)],
    ["flag threshold", numText(doc.threshold)],
    ["min rows per slice", numText(doc.min_samples)],
    ["metric", esc(doc.metric)],
    ["overall metric", numText(doc.overall)],
  ]);

  let sliceTable: string;
  if (twoD) {
    sliceTable = table(
      ["first feature", "second feature", "rows", "metric", "flag"],
      doc.slices.map((s) => [
        rangeText(s.range_a),
        rangeText(s.range_b),
        numText(s.n),
        numText(s.metric),
        s.flag ? '<span class="flag">flagged</span>' : "",
      ]),
    );
  } else {
    sliceTable = table(
      ["slice", "rows", "metric", "flag"],
      doc.slices.map((s) => [
        rangeText(s.range),
        numText(s.n),
        numText(s.metric),
        s.flag ? '<span class="flag">flagged</span>' : "",
      ]),
    );
  }

  let profile = "";
  if (!twoD) {
    const pts = doc.slices
      .filter((s) => s.metric !== null && s.range)
      .map((s) => ({
        x: s.range![0],
        y: s.metric as string,
        title: `${s.range![0]} to ${s.range![1]}: ${s.metric} (rows ${s.n})` +
          (s.flag ? ", flagged" : ""),
      }));
    profile = lineChart([{ name: doc.metric, points: pts }], {
      refLine: { y: doc.overall, label: doc.overall },
    });
  }

  const regions = doc.regions.length === 0
    ? '<p class="na">no flagged regions</p>'
    : table(
        ["region", "rows", "metric"],
        doc.regions.map((r) => [rangeText(r.range), numText(r.n), numText(r.metric)]),
      );

  return head + profile + sliceTable +
    `<h4>flagged regions</h4>` + regions;
}

export function renderOverfitResult(doc: OverfitDoc): string {
  const twoD = doc.features.length > 1;
  const head = kvTable([
    ["model", esc(doc.model)],
    ["features", esc(doc.features.join(", "))],
    ["binning", esc(doc.binning)],
    ["bins", numText(doc.bins)],
    ["gap threshold", numText(doc.delta)],
    ["min rows per split", numText(doc.min_samples)],
    ["metric", esc(doc.metric)],
    ["overall train metric", numText(doc.overall_train)],
    ["overall test metric", numText(doc.overall_test)],
  ]);
  const rangeCols = twoD ? ["first feature", "second feature"] : ["slice"];
  const rows = doc.slices.map((s) => {
    const status = s.overfit
      ? '<span class="flag">overfit</span>'
      : s.underfit
        ? '<span class="flag">underfit</span>'
        : "";
    const ranges = twoD
      ? [rangeText(s.range_a), rangeText(s.range_b)]
      : [rangeText(s.range)];
    return [
      ...ranges,
      numText(s.n_train),
      numText(s.n_test),
      numText(s.train_metric),
      numText(s.test_metric),
      numText(s.gap),
      status,
    ];
  });
  return head + table(
    [...rangeCols, "train rows", "test rows", "train metric", "test metric", "gap", "status"],
    rows,
  );
}

export function renderReliabilityResult(doc: ReliabilityDoc): string {
  const rows: [string, string][] = [
    ["model", esc(doc.model)],
    ["miscoverage alpha", numText(doc.alpha)],
    ["calibration rows", numText(doc.n_calibration)],
    ["score quantile", numText(doc.qhat)],
    ["observed coverage", numText(doc.coverage)],
  ];
  if (doc.mean_width !== undefined) rows.push(["mean interval width", numText(doc.mean_width)]);
  if (doc.mean_set_size !== undefined) rows.push(["mean set size", numText(doc.mean_set_size)]);
  rows.push(["seed", numText(doc.seed)]);
  let slices = "";
  if (doc.per_slice_width && doc.per_slice_width.length) {
    slices = `<h4>interval width by predicted value</h4>` + table(
      ["predictions", "rows", "width"],
      doc.per_slice_width.map((s) => [rangeText(s.range), numText(s.n), numText(s.width)]),
    );
  }
  return kvTable(rows) + `<p class="note">${esc(doc.recipe)}</p>` + slices;
}

export function renderRobustnessResult(doc: RobustnessDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["metric", esc(doc.metric)],
    ["baseline", numText(doc.baseline)],
    ["repeats per scale", numText(doc.repeats)],
    ["perturbed features", esc(doc.features.join(", "))],
    ["seed", numText(doc.seed)],
  ]);
  const pts = doc.series.map((p) => ({
    x: p.lambda,
    y: p.mean,
    title: `noise scale ${p.lambda}: mean ${p.mean}, sd ${p.sd}`,
  }));
  const chart = lineChart([{ name: doc.metric, points: pts }], {
    refLine: { y: doc.baseline, label: doc.baseline },
  });
  const tbl = table(
    ["noise scale", "mean metric", "sd"],
    doc.series.map((p) => [numText(p.lambda), numText(p.mean), numText(p.sd)]),
  );
  return head + chart + tbl;
}

function resilienceCurve(name: string, curve: ResilienceCurvePoint[]): string {
  const pts = curve.map((p) => ({
    x: p.ratio,
    y: p.metric,
    title: `keep ratio ${p.ratio}: ${p.metric} (rows ${p.n})`,
  }));
  return `<h4>${esc(name)}</h4>` + lineChart([{ name, points: pts }]);
}

export function renderResilienceResult(doc: ResilienceDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["metric", esc(doc.metric)],
    ["baseline", numText(doc.baseline)],
    ["seed", numText(doc.seed)],
  ]);
  const parts: string[] = [head];
  const sc = doc.scenarios;
  if (sc.worst_sample) parts.push(resilienceCurve("hardest rows first", sc.worst_sample.curve));
  if (sc.outer_sample) parts.push(resilienceCurve("outermost rows first", sc.outer_sample.curve));
  if (sc.psi) {
    parts.push(`<h4>distribution shift of the hardest rows</h4>` + table(
      ["feature", "psi"],
      sc.psi.map((p) => [esc(p.feature), numText(p.psi)]),
    ));
  }
  if (sc.worst_cluster) {
    parts.push(`<details><summary>worst cluster detail</summary>${genericValue(sc.worst_cluster)}</details>`);
  }
  return parts.join("");
}

export function renderFairnessResult(doc: FairnessDoc): string {
  const head = kvTable([
    ["model", esc(doc.model)],
    ["protected feature", esc(doc.protected)],
    ["reference group", esc(doc.reference)],
    ["favorable threshold", numText(doc.favorable_threshold)],
    ["min group size", numText(doc.min_group)],
    ["flagged", yesNo(doc.flagged)],
  ]);
  const groups = table(
    ["group", "rows", "favorable rate", "impact ratio", "flag"],
    doc.groups.map((g) => [
      esc(g.group) + (g.reference ? ' <span class="note">(reference)</span>' : ""),
      numText(g.n),
      numText(g.favorable_rate),
      numText(g.air),
      g.flag ? '<span class="flag">flagged</span>' : "",
    ]),
  );
  const warnings = doc.warnings.length
    ? `<ul class="warnings">${doc.warnings.map((w) => `<li>${esc(w)}</li>`).join("")}</ul>`
    : "";
  const pts = doc.frontier
    .filter((p) => p.air !== null)
    .map((p) => ({
      x: p.threshold,
      y: p.air as string,
      title: `threshold ${p.threshold}: impact ratio ${p.air}, accuracy ${p.acc}`,
    }));
  const frontier = pts.length
    ? `<h4>threshold frontier</h4>` + lineChart([{ name: "impact ratio", points: pts }]) +
      `<details><summary>frontier table</summary>` + table(
        ["threshold", "impact ratio", "accuracy"],
        doc.frontier.map((p) => [numText(p.threshold), numText(p.air), numText(p.acc)]),
      ) + `</details>`
    : "";
  const segmented = doc.segmented
    ? `<details><summary>segmented view</summary>${genericValue(doc.segmented)}</details>`
    : "";
  return head + groups + warnings + frontier + segmented;
}

export function renderDiagnosticDoc(doc: ResultDoc): string {
  switch (doc.kind) {
    case "accuracy": return renderAccuracyResult(doc);
    case "weakspot": return renderWeakspotResult(doc);
    case "overfit": return renderOverfitResult(doc);
    case "reliability": return renderReliabilityResult(doc);
    case "robustness": return renderRobustnessResult(doc);
    case "resilience": return renderResilienceResult(doc);
    case "fairness": return renderFairnessResult(doc);
    default: return genericValue(doc);
  }
}

export function renderResultEntry(entry: ResultEntry): string {
  if (entry.status !== "ok") return errorBlock(entry.error);
  if (!entry.result) return '<p class="na">empty result</p>';
  return renderDiagnosticDoc(entry.result);
}

// -- panel -------------------------------------------------------------------

export function renderDiagnosePanel(models: ModelDoc[], tab: string,
                                    selectedModel: string | undefined,
                                    entry: ResultEntry | null, ui: Ui): string {
  const active = DIAGNOSTIC_TABS.includes(tab) ? tab : DIAGNOSTIC_TABS[0];
  const tabs = DIAGNOSTIC_TABS.map((t) =>
    `<button type="button" class="tab${t === active ? " active" : ""}" data-tab="${esc(t)}">${esc(t)}</button>`,
  ).join("");

  const fields = DIAGNOSTIC_FORMS[active].map(fieldHtml).join("");
  const picker = modelSelect(models, selectedModel, () => null);
  const run = `<button type="submit"${ui.busy ? " disabled" : ""}>run ${esc(active)}</button>`;
  const form = models.length === 0
    ? '<p class="na">train or register a model first</p>'
    : `<form data-form="diagnose" data-test="${esc(active)}" class="controls">` +
      `<label>model ${picker}</label>${fields}${run}</form>`;

  const body = entry
    ? renderResultEntry(entry)
    : '<p class="na">not run yet</p>';

  return `<section class="panel">
    <h2>Diagnose</h2>
    <div class="tabs">${tabs}</div>
    ${form}
    <div class="result">${body}</div>
  </section>`;
}
