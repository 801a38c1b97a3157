// Hand-rolled SVG charts.
//
// Charts plot the engine's series directly.  Geometry (pixel positions)
// is derived, but every visible label and tooltip is a raw literal from
// the API response; nothing is computed or reformatted client-side.

import { esc } from "./format.js";
import { asFloat } from "./numbers.js";
import type { Num } from "./types.js";

const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed"];

export function seriesColor(i: number): string {
  return PALETTE[((i % PALETTE.length) + PALETTE.length) % PALETTE.length];
}

export interface ChartPoint {
  x: Num;
  y: Num;
  title?: string;
}

export interface ChartSeries {
  name: string;
  points: ChartPoint[];
}

interface Range {
  min: number;
  max: number;
}

function padRange(r: Range): Range {
  if (r.min < r.max) return r;
  const v = r.min;
  const d = v === 0 ? 1 : Math.abs(v) * 0.1;
  return { min: v - d, max: v + d };
}

function finitePoints(s: ChartSeries): { fx: number; fy: number; p: ChartPoint }[] {
  const out: { fx: number; fy: number; p: ChartPoint }[] = [];
  for (const p of s.points) {
    const fx = asFloat(p.x);
    const fy = asFloat(p.y);
    if (Number.isFinite(fx) && Number.isFinite(fy)) out.push({ fx, fy, p });
  }
  return out;
}

export interface LineOpts {
  height?: number;
  // horizontal dashed marker; label must be a literal from the response
  refLine?: { y: Num; label: string };
}

export function lineChart(series: ChartSeries[], opts: LineOpts = {}): string {
  const W = 520;
  const H = opts.height ?? 200;
  const padL = 64;
  const padR = 14;
  const padT = 10;
  const padB = 26;

  const flat = series.map(finitePoints);
  const all = flat.flat();
  if (all.length === 0) return '<p class="na">nothing to plot</p>';

  const refY = opts.refLine ? asFloat(opts.refLine.y) : NaN;
  const ys = all.map((d) => d.fy);
  if (Number.isFinite(refY)) ys.push(refY);
  const xr = padRange({
    min: Math.min(...all.map((d) => d.fx)),
    max: Math.max(...all.map((d) => d.fx)),
  });
  const yr = padRange({ min: Math.min(...ys), max: Math.max(...ys) });
  const sx = (v: number) => padL + ((v - xr.min) / (xr.max - xr.min)) * (W - padL - padR);
  const sy = (v: number) => H - padB - ((v - yr.min) / (yr.max - yr.min)) * (H - padT - padB);

  const parts: string[] = [];
  parts.push(`<line class="axis" x1="${padL}" y1="${H - padB}" x2="${W - padR}" y2="${H - padB}"/>`);
  parts.push(`<line class="axis" x1="${padL}" y1="${padT}" x2="${padL}" y2="${H - padB}"/>`);

  // x tick labels: a spread of actual x literals from the densest series
  const ref = flat.reduce((a, b) => (b.length > a.length ? b : a), flat[0]);
  const nTicks = Math.min(5, ref.length);
  const seen = new Set<string>();
  for (let t = 0; t < nTicks; t++) {
    const d = ref[Math.round((t * (ref.length - 1)) / Math.max(1, nTicks - 1))];
    const label = String(d.p.x);
    if (seen.has(label)) continue;
    seen.add(label);
    const x = sx(d.fx);
    parts.push(`<line class="axis" x1="${x}" y1="${H - padB}" x2="${x}" y2="${H - padB + 4}"/>`);
    parts.push(`<text class="tick" x="${x}" y="${H - 8}" text-anchor="middle">${esc(label)}</text>`);
  }

  // y tick labels: the actual extreme literals
  let lo = all[0];
  let hi = all[0];
  for (const d of all) {
    if (d.fy < lo.fy) lo = d;
    if (d.fy > hi.fy) hi = d;
  }
  parts.push(`<text class="tick" x="${padL - 6}" y="${sy(lo.fy) + 4}" text-anchor="end">${esc(String(lo.p.y))}</text>`);
  if (hi.fy !== lo.fy) {
    parts.push(`<text class="tick" x="${padL - 6}" y="${sy(hi.fy) + 4}" text-anchor="end">${esc(String(hi.p.y))}</text>`);
  }

  if (opts.refLine && Number.isFinite(refY)) {
    const y = sy(refY);
    parts.push(`<line class="ref" x1="${padL}" y1="${y}" x2="${W - padR}" y2="${y}"/>`);
    parts.push(`<text class="tick ref" x="${W - padR}" y="${y - 3}" text-anchor="end">${esc(opts.refLine.label)}</text>`);
  }

  series.forEach((s, si) => {
    const pts = flat[si];
    if (pts.length === 0) return;
    const color = seriesColor(si);
    const coords = pts.map((d) => `${sx(d.fx)},${sy(d.fy)}`).join(" ");
    parts.push(`<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${coords}"/>`);
    for (const d of pts) {
      const tip = d.p.title ?? `${s.name}: ${d.p.x}, ${d.p.y}`;
      parts.push(
        `<circle cx="${sx(d.fx)}" cy="${sy(d.fy)}" r="2.5" fill="${color}">` +
          `<title>${esc(tip)}</title></circle>`,
      );
    }
  });

  const legend = series.length > 1
    ? `<div class="legend">${series
        .map((s, i) => `<span><i style="background:${seriesColor(i)}"></i>${esc(s.name)}</span>`)
        .join("")}</div>`
    : "";
  return `<figure class="chart">${legend}` +
    `<svg viewBox="0 0 ${W} ${H}" role="img">${parts.join("")}</svg></figure>`;
}

export interface BarRow {
  label: string;
  value: Num | null;
  title?: string;
}

export function hBars(rows: BarRow[]): string {
  if (rows.length === 0) return '<p class="na">nothing to plot</p>';
  const W = 520;
  const rowH = 22;
  const labelW = 150;
  const valueW = 10;
  const H = rows.length * rowH + 6;

  const floats = rows.map((r) => asFloat(r.value ?? undefined));
  const maxAbs = Math.max(1e-300, ...floats.filter(Number.isFinite).map(Math.abs));
  const hasNeg = floats.some((v) => Number.isFinite(v) && v < 0);
  const span = W - labelW - valueW - 8;
  const x0 = hasNeg ? labelW + span / 2 : labelW;
  const unit = (hasNeg ? span / 2 : span) / maxAbs;

  const parts: string[] = [];
  if (hasNeg) parts.push(`<line class="axis" x1="${x0}" y1="0" x2="${x0}" y2="${H}"/>`);
  rows.forEach((r, i) => {
    const y = i * rowH + 4;
    parts.push(`<text class="label" x="${labelW - 8}" y="${y + 12}" text-anchor="end">${esc(r.label)}</text>`);
    const v = floats[i];
    if (!Number.isFinite(v)) {
      parts.push(`<text class="tick na" x="${x0 + 4}" y="${y + 12}">n/a</text>`);
      return;
    }
    const w = Math.abs(v) * unit;
    const x = v < 0 ? x0 - w : x0;
    const color = v < 0 ? seriesColor(1) : seriesColor(0);
    const tip = r.title ?? `${r.label}: ${r.value}`;
    parts.push(
      `<rect x="${x}" y="${y}" width="${Math.max(w, 0.5)}" height="14" fill="${color}">` +
        `<title>${esc(tip)}</title></rect>`,
    );
    const tx = v < 0 ? x - 4 : x + w + 4;
    const anchor = v < 0 ? "end" : "start";
    parts.push(`<text class="tick" x="${tx}" y="${y + 12}" text-anchor="${anchor}">${esc(String(r.value))}</text>`);
  });
  return `<figure class="chart"><svg viewBox="0 0 ${W} ${H}" role="img">${parts.join("")}</svg></figure>`;
}

export function histogram(edges: Num[], counts: Num[]): string {
  if (edges.length < 2 || counts.length === 0) return '<p class="na">nothing to plot</p>';
  const W = 520;
  const H = 110;
  const padL = 6;
  const padR = 6;
  const padB = 22;
  const fe = edges.map((e) => asFloat(e));
  const fc = counts.map((c) => asFloat(c));
  const lo = fe[0];
  const hi = fe[fe.length - 1];
  const spanX = hi > lo ? hi - lo : 1;
  const maxC = Math.max(1, ...fc.filter(Number.isFinite));
  const sx = (v: number) => padL + ((v - lo) / spanX) * (W - padL - padR);

  const parts: string[] = [];
  let peak = 0;
  for (let k = 1; k < fc.length; k++) if (fc[k] > fc[peak]) peak = k;
  for (let k = 0; k < fc.length && k + 1 < fe.length; k++) {
    const h = (fc[k] / maxC) * (H - padB - 14);
    const x = sx(fe[k]);
    const w = Math.max(sx(fe[k + 1]) - x - 1, 0.5);
    parts.push(
      `<rect x="${x}" y="${H - padB - h}" width="${w}" height="${h}" class="hist">` +
        `<title>${esc(`${edges[k]} to ${edges[k + 1]}: ${counts[k]}`)}</title></rect>`,
    );
    if (k === peak) {
      parts.push(`<text class="tick" x="${x + w / 2}" y="${H - padB - h - 3}" text-anchor="middle">${esc(String(counts[k]))}</text>`);
    }
  }
  parts.push(`<text class="tick" x="${padL}" y="${H - 6}" text-anchor="start">${esc(String(edges[0]))}</text>`);
  parts.push(`<text class="tick" x="${W - padR}" y="${H - 6}" text-anchor="end">${esc(String(edges[edges.length - 1]))}</text>`);
  return `<figure class="chart"><svg viewBox="0 0 ${W} ${H}" role="img">${parts.join("")}</svg></figure>`;
}
