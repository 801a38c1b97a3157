// Data panel: load and split controls plus the summary and quality
// views straight from the service.

import { histogram } from "../charts.js";
import { esc, kvTable, numText, table, yesNo } from "../format.js";
import type { ExperimentDoc, QualityDoc, SummaryDoc } from "../types.js";
import type { Ui } from "./diagnose.js";

function datasetSection(exp: ExperimentDoc | null): string {
  const ds = exp?.dataset;
  if (!ds) return '<p class="na">no dataset loaded</p>';
  return kvTable([
    ["name", esc(ds.name)],
    ["task", esc(ds.task)],
    ["target", esc(ds.target)],
    ["rows", numText(ds.n_rows)],
    ["train rows", numText(ds.n_train)],
    ["test rows", numText(ds.n_test)],
    ["prepared", yesNo(ds.prepared)],
    ["features", esc(ds.features.join(", "))],
    ["content hash", `<code>${esc(ds.content_hash)}</code>`],
  ]);
}

function numericSection(summary: SummaryDoc): string {
  const names = Object.keys(summary.numeric).sort();
  if (names.length === 0) return "";
  const parts = names.map((name) => {
    const s = summary.numeric[name];
    const kv = kvTable([
      ["rows", numText(s.count)],
      ["mean", numText(s.mean ?? null)],
      ["sd", numText(s.sd ?? null)],
      ["min", numText(s.min ?? null)],
      ["lower quartile", numText(s.q1 ?? null)],
      ["median", numText(s.median ?? null)],
      ["upper quartile", numText(s.q3 ?? null)],
      ["max", numText(s.max ?? null)],
    ]);
    const hist = s.histogram ? histogram(s.histogram.edges, s.histogram.counts) : "";
    return `<details open><summary>${esc(name)}</summary>${kv}${hist}</details>`;
  });
  return `<h3>numeric columns</h3>` + parts.join("");
}

function categoricalSection(summary: SummaryDoc): string {
  const names = Object.keys(summary.categorical).sort();
  if (names.length === 0) return "";
  const parts = names.map((name) => {
    const s = summary.categorical[name];
    const levels = Object.keys(s.frequencies).sort();
    const tbl = table(
      ["level", "rows"],
      levels.map((lv) => [esc(lv), numText(s.frequencies[lv])]),
    );
    return `<details><summary>${esc(name)}</summary>${tbl}</details>`;
  });
  return `<h3>categorical columns</h3>` + parts.join("");
}

function corrTable(columns: string[], matrix: (string | null)[][], label: string): string {
  if (columns.length === 0) return "";
  const rows = columns.map((c, i) => [
    esc(c),
    ...columns.map((_, j) => numText(matrix[i]?.[j] ?? null)),
  ]);
  return `<h4>${esc(label)}</h4>` + table(["", ...columns.map(esc)], rows);
}

function balanceSection(summary: SummaryDoc): string {
  if (!summary.class_balance) return "";
  const rows = Object.keys(summary.class_balance).sort().map((k): [string, string] =>
    [`class ${k}`, numText(summary.class_balance![k])],
  );
  return `<h3>class balance</h3>` + kvTable(rows);
}

function qualitySection(quality: QualityDoc): string {
  const missing = Object.keys(quality.missing_counts).sort();
  const outliers = Object.keys(quality.outlier_counts).sort();
  return `<h3>quality</h3>` + kvTable([
    ["duplicate rows", numText(quality.duplicate_rows)],
    ["constant columns", quality.constant_columns.length
      ? esc(quality.constant_columns.join(", "))
      : '<span class="na">none</span>'],
  ]) + table(
    ["column", "missing rows", "outlier rows"],
    missing.map((c) => [
      esc(c),
      numText(quality.missing_counts[c]),
      outliers.includes(c) ? numText(quality.outlier_counts[c]) : '<span class="na">n/a</span>',
    ]),
  );
}

export function renderDataPanel(exp: ExperimentDoc | null, summary: SummaryDoc | null,
                                quality: QualityDoc | null, ui: Ui): string {
  const dis = ui.busy ? " disabled" : "";
  const loadForm = `<form data-form="load" class="controls">
    <label>csv path <input name="path" data-type="text" required></label>
    <label>target <input name="target" data-type="text" required></label>
    <label>task <select name="task" data-type="text">
      <option value="regression">regression</option>
      <option value="binary">binary</option>
    </select></label>
    <label>name <input name="name" data-type="text"></label>
    <button type="submit"${dis}>load</button>
  </form>`;
  const prepareForm = `<form data-form="prepare" class="controls">
    <label>test ratio <input name="test_ratio" data-type="number" step="any" value="0.2"></label>
    <label>seed <input name="seed" data-type="number" step="any"></label>
    <button type="submit"${dis}>prepare split</button>
  </form>`;

  const parts = [
    `<h2>Data</h2>`,
    loadForm,
    prepareForm,
    datasetSection(exp),
  ];
  if (summary) {
    parts.push(numericSection(summary));
    parts.push(categoricalSection(summary));
    parts.push(balanceSection(summary));
    parts.push(`<h3>correlation</h3>`);
    parts.push(corrTable(summary.correlation.columns, summary.correlation.pearson, "pearson"));
    parts.push(corrTable(summary.correlation.columns, summary.correlation.spearman, "spearman"));
  }
  if (quality) parts.push(qualitySection(quality));
  return `<section class="panel">${parts.join("")}</section>`;
}
