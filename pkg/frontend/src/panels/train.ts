// Train panel: fit a glass model, register an external one, list what
// the experiment currently holds.

import { esc, numText, table, yesNo } from "../format.js";
import type { ExperimentDoc, ModelDoc } from "../types.js";
import type { Ui } from "./diagnose.js";

const FAMILIES = ["glm", "gam", "tree", "xgb1", "xgb2"];

function modelsTable(models: ModelDoc[]): string {
  if (models.length === 0) return '<p class="na">no models yet</p>';
  return table(
    ["name", "family", "task", "interpretable", "evaluable", "features"],
    models.map((m) => [
      esc(m.name),
      esc(m.family),
      esc(m.task),
      yesNo(m.interpretable),
      yesNo(m.evaluable),
      esc(m.features.join(", ")),
    ]),
  );
}

function resultsTable(exp: ExperimentDoc | null): string {
  const results = exp?.results ?? [];
  if (results.length === 0) return '<p class="na">no stored results</p>';
  return table(
    ["test", "model", "status", "config hash"],
    results.map((r) => [
      esc(r.test),
      esc(Array.isArray(r.model) ? r.model.join(", ") : r.model),
      esc(r.status),
      `<code>${esc(r.config_hash)}</code>`,
    ]),
  );
}

export function renderTrainPanel(exp: ExperimentDoc | null, models: ModelDoc[], ui: Ui): string {
  const dis = ui.busy ? " disabled" : "";
  const options = FAMILIES.map((f) => `<option value="${f}">${f}</option>`).join("");
  const trainForm = `<form data-form="train" class="controls">
    <label>family <select name="family" data-type="text">${options}</select></label>
    <label>model id <input name="id" data-type="text"></label>
    <label>seed <input name="seed" data-type="number" step="any"></label>
    <label>purify <input name="purify" type="checkbox" data-type="checkbox"></label>
    <label class="wide">params (json object)
      <textarea name="params" data-type="json" rows="3" placeholder='{"rounds": 100}'></textarea>
    </label>
    <button type="submit"${dis}>train</button>
  </form>`;
  const registerForm = `<form data-form="register" class="controls">
    <label>model id <input name="id" data-type="text" required></label>
    <label>scores csv path <input name="scores_path" data-type="text" required></label>
    <button type="submit"${dis}>register</button>
  </form>`;
  return `<section class="panel">
    <h2>Train</h2>
    ${trainForm}
    <h3>register an external score table</h3>
    <p class="note">a registered model can only be evaluated on the rows it shipped scores for;
    interpretation and fresh predictions stay unavailable for it</p>
    ${registerForm}
    <h3>models</h3>
    ${modelsTable(models)}
    <h3>stored results</h3>
    ${resultsTable(exp)}
  </section>`;
}
