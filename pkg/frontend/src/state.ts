// UI state lives in the URL hash so any view can be bookmarked or
// shared and a reload lands on the same panel.

export const PANELS = ["data", "train", "interpret", "explain", "diagnose", "compare"] as const;
export type Panel = (typeof PANELS)[number];

export interface AppState {
  panel: Panel;
  model?: string;    // selected model (interpret / explain / diagnose)
  tab?: string;      // diagnostic test on the diagnose panel
  method?: string;   // explainer on the explain panel
  row?: string;      // instance picker
  local?: boolean;   // interpret: local breakdown instead of global
  models?: string[]; // compare selection
  tests?: string[];  // compare test selection
}

export function encodeState(s: AppState): string {
  const p = new URLSearchParams();
  if (s.model) p.set("model", s.model);
  if (s.tab) p.set("tab", s.tab);
  if (s.method) p.set("method", s.method);
  if (s.row) p.set("row", s.row);
  if (s.local) p.set("local", "1");
  if (s.models && s.models.length) p.set("models", s.models.join(","));
  if (s.tests && s.tests.length) p.set("tests", s.tests.join(","));
  const q = p.toString();
  return `#/${s.panel}${q ? "?" + q : ""}`;
}

export function parseState(hash: string): AppState {
  let h = hash.startsWith("#") ? hash.slice(1) : hash;
  if (h.startsWith("/")) h = h.slice(1);
  const qi = h.indexOf("?");
  const name = qi < 0 ? h : h.slice(0, qi);
  const query = qi < 0 ? "" : h.slice(qi + 1);
  const panel = (PANELS as readonly string[]).includes(name) ? (name as Panel) : "data";
  const p = new URLSearchParams(query);
  const out: AppState = { panel };
  const model = p.get("model");
  if (model) out.model = model;
  const tab = p.get("tab");
  if (tab) out.tab = tab;
  const method = p.get("method");
  if (method) out.method = method;
  const row = p.get("row");
  if (row) out.row = row;
  if (p.get("local") === "1") out.local = true;
  const models = p.get("models");
  if (models) out.models = models.split(",").filter((x) => x.length > 0);
  const tests = p.get("tests");
  if (tests) out.tests = tests.split(",").filter((x) => x.length > 0);
  return out;
}
