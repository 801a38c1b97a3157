// Fidelity: every number a panel renders must appear verbatim in the API
// response it came from.  Both sides are tokenized the same way, so a
// reformatted or recomputed value shows up as a missing token.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { parseVerbatim } from "../src/minijson.js";
import { numberTokens, stripTags } from "../src/numbers.js";
import { renderComparePanel } from "../src/panels/compare.js";
import { renderDataPanel } from "../src/panels/data.js";
import { renderDiagnosePanel } from "../src/panels/diagnose.js";
import { renderExplainPanel } from "../src/panels/explain.js";
import { renderInterpretPanel } from "../src/panels/interpret.js";
import { renderTrainPanel } from "../src/panels/train.js";
import type {
  ComparisonDoc, ExperimentDoc, ModelDoc, QualityDoc, ResultEntry, SummaryDoc, WeakspotDoc,
} from "../src/types.js";

const FIXTURES = join(__dirname, "fixtures");
const UI = { busy: false };

function raw(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

function doc<T>(name: string): T {
  return parseVerbatim(raw(name)) as T;
}

const models = doc<ModelDoc[]>("models.json");

// rendered tokens must be a subset of the union of response tokens
function assertVerbatim(html: string, sources: string[]): string[] {
  const rendered = numberTokens(stripTags(html));
  const allowed = new Set<string>();
  for (const s of sources) for (const t of numberTokens(s)) allowed.add(t);
  const missing = rendered.filter((t) => !allowed.has(t));
  expect(missing).toEqual([]);
  return rendered;
}

describe("weakspot panel fidelity", () => {
  const source = raw("weakspot.json");
  const entry = doc<ResultEntry>("weakspot.json");

  it("renders only literals from the response", () => {
    const html = renderDiagnosePanel(models, "weakspot", "xgb2", entry, UI);
    const rendered = assertVerbatim(html, [source]);
    expect(rendered.length).toBeGreaterThan(20);
  });

  it("shows the headline and per-slice literals", () => {
    const html = renderDiagnosePanel(models, "weakspot", "xgb2", entry, UI);
    const ws = entry.result as WeakspotDoc;
    expect(html).toContain(String(ws.overall));
    for (const s of ws.slices) {
      if (s.metric !== null) expect(html).toContain(String(s.metric));
      expect(html).toContain(String(s.n));
    }
  });
});

describe("compare panel fidelity", () => {
  const source = raw("compare.json");
  const entry = doc<ResultEntry>("compare.json");

  it("renders only literals from the response", () => {
    const html = renderComparePanel(models, ["glm", "xgb2"], ["robustness", "reliability"],
                                    entry, UI);
    const rendered = assertVerbatim(html, [source]);
    expect(rendered.length).toBeGreaterThan(40);
  });

  it("shows metrics, ranks and curve points from the response", () => {
    const html = renderComparePanel(models, ["glm", "xgb2"], [], entry, UI);
    const cmp = entry.result as ComparisonDoc;
    for (const name of cmp.models) {
      for (const split of Object.keys(cmp.metrics[name])) {
        for (const metric of Object.keys(cmp.metrics[name][split])) {
          expect(html).toContain(String(cmp.metrics[name][split][metric]));
        }
      }
    }
    for (const row of cmp.overall) {
      expect(html).toContain(String(row.mean_rank));
      expect(html).toContain(String(row.tiebreak));
    }
    for (const name of Object.keys(cmp.curves.robustness)) {
      for (const pt of cmp.curves.robustness[name]) {
        expect(html).toContain(String(pt.mean));
      }
    }
  });
});

describe("other panels stay verbatim too", () => {
  it("data panel", () => {
    const html = renderDataPanel(
      doc<ExperimentDoc>("experiment.json"),
      doc<SummaryDoc>("summary.json"),
      doc<QualityDoc>("quality.json"),
      UI,
    );
    assertVerbatim(html, [raw("experiment.json"), raw("summary.json"), raw("quality.json")]);
  });

  it("train panel", () => {
    const html = renderTrainPanel(doc<ExperimentDoc>("experiment.json"), models, UI);
    assertVerbatim(html, [raw("experiment.json"), raw("models.json")]);
  });

  it("interpret panel, global and local", () => {
    const g = renderInterpretPanel(models, "glm", false, undefined,
                                   doc<ResultEntry>("interpret.json"), UI);
    assertVerbatim(g, [raw("interpret.json")]);
    const l = renderInterpretPanel(models, "glm", true, "3",
                                   doc<ResultEntry>("interpret_local.json"), UI);
    assertVerbatim(l, [raw("interpret_local.json"), "3"]);
  });

  it("explain panel, pfi and ale", () => {
    const pfi = renderExplainPanel(models, "xgb2", "pfi", doc<ResultEntry>("pfi.json"), UI);
    assertVerbatim(pfi, [raw("pfi.json")]);
    const ale = renderExplainPanel(models, "xgb2", "ale", doc<ResultEntry>("ale.json"), UI);
    assertVerbatim(ale, [raw("ale.json")]);
  });

  it("diagnose accuracy tab", () => {
    const html = renderDiagnosePanel(models, "accuracy", "xgb2",
                                     doc<ResultEntry>("accuracy.json"), UI);
    assertVerbatim(html, [raw("accuracy.json")]);
  });
});
