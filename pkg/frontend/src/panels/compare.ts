// Compare panel: pick two or three models, run the shared diagnostics,
// and read aligned metric tables, per-criterion ranks and overlaid
// curves.  Every figure comes straight out of the comparison document.

import { lineChart } from "../charts.js";
import { errorBlock, esc, kvTable, numText, table } from "../format.js";
import type {
  ComparisonDoc, ModelDoc, Num, ResultEntry, RobustnessPoint,
} from "../types.js";
import type { Ui } from "./diagnose.js";

const RELIABILITY_KEYS = [
  "alpha", "coverage", "mean_width", "mean_set_size", "n_calibration", "qhat",
];

export const COMPARE_TEST_CHOICES = ["robustness", "reliability", "resilience"];

function metricsSection(doc: ComparisonDoc): string {
  const splits = Array.from(
    new Set(doc.models.flatMap((m) => Object.keys(doc.metrics[m] ?? {}))),
  ).sort();
  const parts: string[] = [];
  for (const split of splits) {
    const metricNames = Array.from(
      new Set(doc.models.flatMap((m) => Object.keys(doc.metrics[m]?.[split] ?? {}))),
    ).sort();
    const rows = metricNames.map((mn) => [
      esc(mn),
      ...doc.models.map((m) => numText(doc.metrics[m]?.[split]?.[mn] ?? null)),
    ]);
    parts.push(`<h4>${esc(split)} split</h4>` + table(["metric", ...doc.models.map(esc)], rows));
  }
  return parts.join("");
}

function criteriaSection(doc: ComparisonDoc): string {
  const rows = doc.criteria.map((c) => [
    esc(c.criterion),
    c.higher_is_better ? "higher wins" : "lower wins",
    ...doc.models.map((m) => {
      const v = c.values[m] ?? null;
      const r = c.ranks[m] ?? null;
      return `${numText(v)} <span class="rank">rank ${numText(r)}</span>`;
    }),
  ]);
  return table(["criterion", "direction", ...doc.models.map(esc)], rows);
}

function overallSection(doc: ComparisonDoc): string {
  const rows = doc.overall.map((o) => [
    esc(o.model),
    numText(o.mean_rank),
    numText(o.rank),
    esc(o.tiebreak_metric),
    numText(o.tiebreak),
  ]);
  return table(["model", "mean rank", "overall rank", "tiebreak metric", "tiebreak"], rows);
}

function robustnessCurves(curves: Record<string, RobustnessPoint[]>): string {
  const series = Object.keys(curves).map((name) => ({
    name,
    points: curves[name].map((p) => ({
      x: p.lambda,
      y: p.mean,
      title: `${name} at noise scale ${p.lambda}: mean ${p.mean}, sd ${p.sd}`,
    })),
  }));
  return `<h4>robustness</h4>` + lineChart(series);
}

function reliabilityTable(curves: Record<string, Record<string, unknown>>): string {
  const names = Object.keys(curves);
  const keys = RELIABILITY_KEYS.filter((k) => names.some((n) => curves[n][k] !== undefined));
  const rows = keys.map((k) => [
    esc(k.replace(/_/g, " ")),
    ...names.map((n) => {
      const v = curves[n][k];
      return typeof v === "string" ? numText(v as Num) : numText(null);
    }),
  ]);
  return `<h4>reliability</h4>` + table(["", ...names.map(esc)], rows);
}

function resilienceCurves(curves: Record<string, { ratio: Num; n: Num; metric: Num }[]>): string {
  const series = Object.keys(curves).map((name) => ({
    name,
    points: curves[name].map((p) => ({
      x: p.ratio,
      y: p.metric,
      title: `${name} at keep ratio ${p.ratio}: ${p.metric} (rows ${p.n})`,
    })),
  }));
  return `<h4>resilience (hardest rows first)</h4>` + lineChart(series);
}

export function renderCompareResult(doc: ComparisonDoc): string {
  const head = kvTable([
    ["models", esc(doc.models.join(", "))],
    ["task", esc(doc.task)],
    ["tests", esc(doc.tests.join(", "))],
    ["seed", numText(doc.seed)],
  ]);
  const parts = [head, metricsSection(doc)];
  if (doc.curves.robustness) parts.push(robustnessCurves(doc.curves.robustness));
  if (doc.curves.reliability) parts.push(reliabilityTable(doc.curves.reliability));
  if (doc.curves.resilience) parts.push(resilienceCurves(doc.curves.resilience));
  parts.push(`<h4>criteria and ranks</h4>`, criteriaSection(doc));
  parts.push(`<h4>overall ranking</h4>`, overallSection(doc));
  return parts.join("");
}

export function renderComparePanel(models: ModelDoc[], selected: string[],
                                   tests: string[], entry: ResultEntry | null,
                                   ui: Ui): string {
  const boxes = models.map((m) => {
    const checked = selected.includes(m.name) ? " checked" : "";
    const dis = m.evaluable
      ? ""
      : ` disabled title="model '${esc(m.name)}' cannot score fresh rows, so it cannot join a comparison"`;
    return `<label class="check${m.evaluable ? "" : " muted"}">` +
      `<input type="checkbox" name="models" value="${esc(m.name)}"${checked}${dis}>` +
      ` ${esc(m.name)} (${esc(m.family)})</label>`;
  }).join("");

  const testBoxes = COMPARE_TEST_CHOICES.map((t) => {
    const checked = tests.includes(t) ? " checked" : "";
    return `<label class="check"><input type="checkbox" name="tests" value="${esc(t)}"${checked}> ${esc(t)}</label>`;
  }).join("");

  const count = selected.length;
  const countOk = count >= 2 && count <= 3;
  const run = `<button type="submit"${ui.busy || !countOk ? " disabled" : ""}>run comparison</button>`;
  const hint = countOk ? "" : '<p class="na">pick two or three models; accuracy is always included</p>';

  const form = models.length === 0
    ? '<p class="na">train or register models first</p>'
    : `<form data-form="compare" class="controls">
        <fieldset><legend>models</legend>${boxes}</fieldset>
        <fieldset><legend>extra tests</legend>${testBoxes}</fieldset>
        ${hint}${run}
      </form>`;

  let body = '<p class="na">not run yet</p>';
  if (entry) {
    body = entry.status === "ok" && entry.result
      ? renderCompareResult(entry.result as ComparisonDoc)
      : errorBlock(entry.error);
  }

  return `<section class="panel">
    <h2>Compare</h2>
    ${form}
    <div class="result">${body}</div>
  </section>`;
}
