// Small HTML building blocks used by every panel.

import type { Num } from "./types.js";

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// numbers arrive as raw response literals; null means "not defined here"
export function numText(raw: Num | null | undefined): string {
  if (raw == null) return '<span class="na">n/a</span>';
  return `<span class="num">${esc(raw)}</span>`;
}

export function yesNo(b: boolean): string {
  return b ? "yes" : "no";
}

export function rangeText(range: [Num, Num] | undefined): string {
  if (!range) return '<span class="na">n/a</span>';
  return `${numText(range[0])} to ${numText(range[1])}`;
}

export function kvTable(rows: [string, string][]): string {
  const body = rows
    .map(([k, v]) => `<tr><th>${esc(k)}</th><td>${v}</td></tr>`)
    .join("");
  return `<table class="kv">${body}</table>`;
}

export function table(headers: string[], rows: string[][], cls = ""): string {
  const head = headers.map((h) => `<th>${esc(h)}</th>`).join("");
  const body = rows
    .map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join("")}</tr>`)
    .join("");
  return `<div class="scroll"><table class="grid ${cls}">` +
    `<thead><tr>${head}</tr></thead><tbody>${body}</tbody></table></div>`;
}

// Fallback renderer for nested structures with no dedicated view (tree
// summaries, cluster details).  Leaves are printed verbatim.
export function genericValue(v: unknown): string {
  if (v === null || v === undefined) return '<span class="na">null</span>';
  if (typeof v === "boolean") return yesNo(v);
  if (typeof v === "string") return `<span>${esc(v)}</span>`;
  if (Array.isArray(v)) {
    if (v.length === 0) return '<span class="na">empty</span>';
    return `<ul class="tree">${v.map((x) => `<li>${genericValue(x)}</li>`).join("")}</ul>`;
  }
  if (typeof v === "object") {
    const entries = Object.entries(v as Record<string, unknown>);
    return `<ul class="tree">${entries
      .map(([k, x]) => `<li><span class="key">${esc(k)}</span> ${genericValue(x)}</li>`)
      .join("")}</ul>`;
  }
  return `<span>${esc(String(v))}</span>`;
}

export function errorBlock(err: { type: string; message: string } | undefined): string {
  if (!err) return '<p class="error">run failed</p>';
  return `<p class="error"><strong>${esc(err.type)}</strong> ${esc(err.message)}</p>`;
}
