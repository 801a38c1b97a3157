// App shell: hash routing, event delegation, data fetching.  Every view
// is a pure render function over parsed API documents, so this file only
// owns state and wiring.

import { Api, ApiError } from "./api.js";
import { esc } from "./format.js";
import { renderComparePanel } from "./panels/compare.js";
import { renderDataPanel } from "./panels/data.js";
import { renderDiagnosePanel } from "./panels/diagnose.js";
import { renderExplainPanel } from "./panels/explain.js";
import { renderInterpretPanel } from "./panels/interpret.js";
import { renderTrainPanel } from "./panels/train.js";
import { AppState, PANELS, encodeState, parseState } from "./state.js";
import type {
  ExperimentDoc, ModelDoc, QualityDoc, ResultEntry, SummaryDoc,
} from "./types.js";

interface Banner {
  message: string;
  retry: (() => void) | null;
}

function describeError(e: unknown): string {
  if (e instanceof ApiError) {
    if (e.body && e.body.error) {
      const t = e.body.type ? ` (${e.body.type})` : "";
      return `${e.body.error}${t}`;
    }
    return e.status ? `request failed with status ${e.status}` : e.message;
  }
  return String(e);
}

export class App {
  api: Api;
  root: HTMLElement;
  state: AppState = { panel: "data" };
  busy = false;
  banner: Banner | null = null;

  exp: ExperimentDoc | null = null;
  models: ModelDoc[] = [];
  summary: SummaryDoc | null = null;
  quality: QualityDoc | null = null;

  interpretEntry: ResultEntry | null = null;
  explainEntry: ResultEntry | null = null;
  compareEntry: ResultEntry | null = null;
  diagnoseEntries: Record<string, ResultEntry> = {};

  constructor(root: HTMLElement, api?: Api) {
    this.root = root;
    this.api = api ?? new Api("");
  }

  start(): void {
    this.state = parseState(window.location.hash);
    window.addEventListener("hashchange", () => {
      this.state = parseState(window.location.hash);
      void this.refresh();
    });
    this.root.addEventListener("click", (ev) => this.onClick(ev));
    this.root.addEventListener("change", (ev) => this.onChange(ev));
    this.root.addEventListener("submit", (ev) => this.onSubmit(ev));
    void this.refresh();
  }

  setState(next: AppState): void {
    this.state = next;
    const encoded = encodeState(next);
    if (window.location.hash !== encoded) {
      // render happens via the hashchange listener
      window.location.hash = encoded;
    } else {
      this.render();
    }
  }

  fail(e: unknown, retry: (() => void) | null): void {
    this.banner = { message: describeError(e), retry };
    this.render();
  }

  async refresh(): Promise<void> {
    try {
      this.exp = await this.api.experiment();
      this.models = await this.api.models();
      if (this.state.panel === "data" && this.exp.dataset) {
        this.summary = await this.api.summary();
        this.quality = await this.api.quality();
      }
      this.banner = null;
    } catch (e) {
      this.fail(e, () => void this.refresh());
      return;
    }
    this.render();
  }

  // -- rendering -------------------------------------------------------------

  render(): void {
    const nav = PANELS.map((p) =>
      `<button type="button" class="nav${p === this.state.panel ? " active" : ""}" data-nav="${p}">${p}</button>`,
    ).join("");
    const busyNote = this.busy ? '<span class="busy">working</span>' : "";
    const banner = this.banner
      ? `<div class="banner"><span>${esc(this.banner.message)}</span>` +
        (this.banner.retry ? '<button type="button" data-action="retry">retry</button>' : "") +
        '<button type="button" data-action="dismiss">dismiss</button></div>'
      : "";
    this.root.innerHTML = `<header><h1>glassbench</h1><nav>${nav}</nav>${busyNote}</header>` +
      banner + this.panelHtml();
  }

  panelHtml(): string {
    const ui = { busy: this.busy };
    const s = this.state;
    switch (s.panel) {
      case "train":
        return renderTrainPanel(this.exp, this.models, ui);
      case "interpret":
        return renderInterpretPanel(this.models, s.model, s.local ?? false, s.row,
                                    this.interpretEntry, ui);
      case "explain":
        return renderExplainPanel(this.models, s.model, s.method ?? "pfi",
                                  this.explainEntry, ui);
      case "diagnose": {
        const tab = s.tab ?? "accuracy";
        return renderDiagnosePanel(this.models, tab, s.model,
                                   this.diagnoseEntries[tab] ?? null, ui);
      }
      case "compare":
        return renderComparePanel(this.models, s.models ?? [], s.tests ?? [],
                                  this.compareEntry, ui);
      default:
        return renderDataPanel(this.exp, this.summary, this.quality, ui);
    }
  }

  // -- events ----------------------------------------------------------------

  onClick(ev: Event): void {
    const el = (ev.target as HTMLElement).closest("[data-nav],[data-tab],[data-action]");
    if (!el) return;
    const nav = el.getAttribute("data-nav");
    if (nav) {
      const panel = PANELS.find((p) => p === nav) ?? "data";
      this.setState({ ...this.state, panel });
      return;
    }
    const tab = el.getAttribute("data-tab");
    if (tab) {
      this.setState({ ...this.state, tab });
      return;
    }
    const action = el.getAttribute("data-action");
    if (action === "dismiss") {
      this.banner = null;
      this.render();
    } else if (action === "retry") {
      const retry = this.banner?.retry;
      this.banner = null;
      this.render();
      if (retry) retry();
    }
  }

  onChange(ev: Event): void {
    const el = ev.target as HTMLInputElement | HTMLSelectElement;
    const bind = el.getAttribute("data-bind");
    if (bind === "model") {
      this.setState({ ...this.state, model: el.value });
      return;
    }
    if (bind === "method") {
      this.setState({ ...this.state, method: el.value });
      return;
    }
    const form = el.closest("form");
    const kind = form?.getAttribute("data-form");
    if (kind === "compare" && (el.name === "models" || el.name === "tests")) {
      const checked = Array.from(form!.querySelectorAll<HTMLInputElement>(
        `input[name="${el.name}"]:checked`)).map((b) => b.value);
      if (el.name === "models") this.setState({ ...this.state, models: checked });
      else this.setState({ ...this.state, tests: checked });
      return;
    }
    if (kind === "interpret" && el.name === "local") {
      this.setState({ ...this.state, local: (el as HTMLInputElement).checked });
      return;
    }
    if (kind === "interpret" && el.name === "row") {
      this.state.row = el.value; // no re-render, keep focus in the field
    }
  }

  onSubmit(ev: Event): void {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const kind = form.getAttribute("data-form");
    if (!kind || this.busy) return;
    let values: Record<string, unknown>;
    try {
      values = collectForm(form);
    } catch (e) {
      this.fail(e, null);
      return;
    }
    void this.submit(kind, form, values);
  }

  async submit(kind: string, form: HTMLFormElement, values: Record<string, unknown>): Promise<void> {
    this.busy = true;
    this.render();
    try {
      switch (kind) {
        case "load":
          await this.api.loadData(values as { path: string; target: string; task: string });
          this.summary = null;
          this.quality = null;
          break;
        case "prepare":
          await this.api.prepare(values);
          break;
        case "train":
          await this.api.runJob(this.api.train(values as { family: string }));
          break;
        case "register":
          await this.api.register(values as { id: string; scores_path: string });
          break;
        case "interpret": {
          const body: { model: string; local?: boolean; row?: number } = {
            model: String(values.model ?? ""),
          };
          if (values.local) {
            body.local = true;
            if (values.row !== undefined) body.row = values.row as number;
          }
          this.interpretEntry = await this.api.runJob(this.api.interpret(body));
          break;
        }
        case "explain": {
          const { model, method, ...config } = values;
          this.explainEntry = await this.api.runJob(this.api.explain({
            model: String(model ?? ""), method: String(method ?? "pfi"), config,
          }));
          break;
        }
        case "diagnose": {
          const test = form.getAttribute("data-test") ?? "accuracy";
          const { model, ...config } = values;
          this.diagnoseEntries[test] = await this.api.runJob(this.api.diagnose(test, {
            model: model === undefined ? undefined : String(model), config,
          }));
          break;
        }
        case "compare": {
          const models = this.state.models ?? [];
          const tests = this.state.tests ?? [];
          this.compareEntry = await this.api.runJob(this.api.compare({
            models, tests: tests.length ? tests : undefined,
          }));
          break;
        }
        default:
          return;
      }
      this.busy = false;
      await this.refresh();
    } catch (e) {
      this.busy = false;
      this.fail(e, null);
    }
  }
}

// Read a form into a request body.  Each input carries a data-type that
// says how its string value becomes JSON; blank fields are omitted.
export function collectForm(form: HTMLFormElement): Record<string, unknown> {
  const out: Record<string, unknown> = {};
  const seen = new Set<string>();
  for (const el of Array.from(form.elements)) {
    const input = el as HTMLInputElement;
    const name = input.name;
    if (!name || seen.has(name) || input.disabled) continue;
    if (input.type === "submit" || input.type === "button") continue;
    if (input.type === "checkbox") {
      if (name === "models" || name === "tests") continue; // handled via state
      seen.add(name);
      if (input.checked) out[name] = true;
      continue;
    }
    seen.add(name);
    const raw = input.value.trim();
    if (raw === "") continue;
    const type = input.getAttribute("data-type") ?? "text";
    if (type === "number") {
      const n = Number(raw);
      if (Number.isNaN(n)) throw new Error(`field '${name}' needs a number, got '${raw}'`);
      out[name] = n;
    } else if (type === "csv") {
      out[name] = raw.split(",").map((s) => s.trim()).filter((s) => s !== "");
    } else if (type === "numcsv") {
      out[name] = raw.split(",").map((s) => {
        const n = Number(s.trim());
        if (Number.isNaN(n)) throw new Error(`field '${name}' needs numbers, got '${s.trim()}'`);
        return n;
      });
    } else if (type === "json") {
      try {
        out[name] = JSON.parse(raw);
      } catch {
        throw new Error(`field '${name}' is not valid json`);
      }
    } else {
      out[name] = raw;
    }
  }
  return out;
}

if (typeof document !== "undefined") {
  const rootEl = document.getElementById("app");
  if (rootEl) new App(rootEl).start();
}
