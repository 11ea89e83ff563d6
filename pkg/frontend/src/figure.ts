/**
 * Deterministic SVG spectra figures.
 *
 * A figure overlays averaged mode-energy series (Dirichlet runs as filled
 * dots, periodic runs as crosses, matching the usual plotting convention),
 * optional fitted guide lines from fit-report JSON, and optional power-law
 * reference lines.  The x axis is mode index k (linear in semi-log mode,
 * logarithmic in log-log mode); the y axis is always log10 of the energy.
 *
 * Rendering is a pure function of the inputs: fixed canvas, fixed number
 * formatting, no timestamps, so the same artifacts give byte-identical
 * SVG.  Series with a fit attached must share the fit's config hash
 * (mixed-provenance overlays are rejected).
 */

import { ArtifactError, FitReport, SpectrumData } from "./artifacts.js";

export type FigureScale = "semilog" | "loglog";
export type Marker = "dot" | "cross";
export type Parity = "odd" | "even" | "all";

export interface SeriesInput {
  spectrum: SpectrumData;
  label?: string;
  marker?: Marker;
  parity?: Parity;
  fit?: FitReport;
  color?: string;
}

export interface GuideLine {
  exponent: number; // E ~ k^exponent reference, loglog figures
  through: [number, number]; // anchor point (k, E)
  label?: string;
}

export interface FigureInput {
  series: SeriesInput[];
  scale: FigureScale;
  title?: string;
  guide?: GuideLine;
  width?: number;
  height?: number;
  eFloor?: number; // drop averages below this (default 1e-30)
}

const COLORS = ["#1f4e89", "#c0392b", "#1e8449", "#7d3c98", "#b7950b", "#148f9c"];
const LN10 = Math.log(10);

function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new ArtifactError(`non-finite coordinate ${x}`);
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

function powLabel(exp: number): string {
  return `10^${exp}`;
}

class LinearMap {
  constructor(
    private x0: number,
    private x1: number,
    private p0: number,
    private p1: number,
  ) {}

  at(x: number): number {
    const t = (x - this.x0) / (this.x1 - this.x0);
    return this.p0 + t * (this.p1 - this.p0);
  }
}

function decadeTicks(lo: number, hi: number, maxTicks = 12): number[] {
  const first = Math.ceil(lo);
  const last = Math.floor(hi);
  const every = Math.max(1, Math.ceil((last - first + 1) / maxTicks));
  const ticks: number[] = [];
  for (let d = first; d <= last; d += every) ticks.push(d);
  return ticks;
}

function linearTicks(lo: number, hi: number, maxTicks = 10): number[] {
  const span = hi - lo;
  const raw = span / Math.max(1, maxTicks - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= maxTicks - 1) ?? 10 * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12; v += step) ticks.push(v);
  return ticks;
}

interface Pt {
  x: number;
  y: number;
}

function seriesPoints(s: SeriesInput, scale: FigureScale, eFloor: number): Pt[] {
  const parity = s.parity ?? "odd";
  const pts: Pt[] = [];
  for (let i = 0; i < s.spectrum.k.length; i++) {
    const k = s.spectrum.k[i];
    const e = s.spectrum.eAvg[i];
    if (k < 1 || e <= eFloor) continue;
    if (parity === "odd" && k % 2 !== 1) continue;
    if (parity === "even" && k % 2 !== 0) continue;
    pts.push({ x: scale === "loglog" ? Math.log10(k) : k, y: Math.log10(e) });
  }
  return pts;
}

function checkLineage(series: SeriesInput[]): void {
  for (const s of series) {
    if (!s.fit) continue;
    if (!s.spectrum.configHash || !s.fit.configHash) {
      throw new ArtifactError("fit overlay requires config hashes on both artifacts");
    }
    if (s.spectrum.configHash !== s.fit.configHash) {
      throw new ArtifactError(
        `mixed provenance: spectrum ${s.spectrum.configHash.slice(0, 12)} vs fit ${s.fit.configHash.slice(0, 12)}`,
      );
    }
  }
}

function markerAt(x: number, y: number, kind: Marker, color: string): string {
  if (kind === "dot") {
    return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="2.4" fill="${color}"/>`;
  }
  const d = 2.8;
  return (
    `<path d="M ${fmt(x - d)} ${fmt(y - d)} L ${fmt(x + d)} ${fmt(y + d)} ` +
    `M ${fmt(x - d)} ${fmt(y + d)} L ${fmt(x + d)} ${fmt(y - d)}" ` +
    `stroke="${color}" stroke-width="1.2" fill="none"/>`
  );
}

function fitPath(
  line: { kind: string; slope: number; intercept: number; window: [number, number] },
  scale: FigureScale,
  xm: LinearMap,
  ym: LinearMap,
  color: string,
): string {
  const [kLo, kHi] = line.window;
  const pts: string[] = [];
  const n = 32;
  for (let i = 0; i <= n; i++) {
    const k = kLo + ((kHi - kLo) * i) / n;
    const lnE = line.kind === "powerlaw" ? line.intercept + line.slope * Math.log(k) : line.intercept + line.slope * k;
    const x = scale === "loglog" ? Math.log10(k) : k;
    const y = lnE / LN10;
    pts.push(`${fmt(xm.at(x))} ${fmt(ym.at(y))}`);
  }
  return `<path d="M ${pts.join(" L ")}" stroke="${color}" stroke-width="1" stroke-dasharray="5 3" fill="none"/>`;
}

export function renderFigure(input: FigureInput): string {
  if (!input.series.length) throw new ArtifactError("figure needs at least one series");
  if (input.scale !== "semilog" && input.scale !== "loglog") {
    throw new ArtifactError(`scale must be semilog or loglog, got ${String(input.scale)}`);
  }
  checkLineage(input.series);
  const eFloor = input.eFloor ?? 1e-30;
  const width = input.width ?? 560;
  const height = input.height ?? 420;
  const margin = { left: 64, right: 16, top: input.title ? 36 : 16, bottom: 46 };

  const all: Pt[] = [];
  const perSeries = input.series.map((s) => {
    const pts = seriesPoints(s, input.scale, eFloor);
    if (!pts.length) throw new ArtifactError(`series ${s.label ?? "?"} has no plottable points`);
    all.push(...pts);
    return pts;
  });

  let xLo = Math.min(...all.map((p) => p.x));
  let xHi = Math.max(...all.map((p) => p.x));
  let yLo = Math.min(...all.map((p) => p.y));
  let yHi = Math.max(...all.map((p) => p.y));
  const xPad = 0.02 * (xHi - xLo || 1);
  const yPad = 0.04 * (yHi - yLo || 1);
  xLo -= xPad;
  xHi += xPad;
  yLo -= yPad;
  yHi += yPad;

  const xm = new LinearMap(xLo, xHi, margin.left, width - margin.right);
  const ym = new LinearMap(yLo, yHi, height - margin.bottom, margin.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="11">`,
  );
  parts.push(`<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`);
  const hashes = input.series
    .map((s) => s.spectrum.configHash ?? "none")
    .map((h) => h.slice(0, 12))
    .join(",");
  parts.push(`<metadata>config_hashes: ${hashes}</metadata>`);
  if (input.title) {
    parts.push(`<text x="${fmt(width / 2)}" y="20" text-anchor="middle" font-size="13">${input.title}</text>`);
  }

  // frame
  const x0 = margin.left;
  const x1 = width - margin.right;
  const y0 = height - margin.bottom;
  const y1 = margin.top;
  parts.push(
    `<path d="M ${fmt(x0)} ${fmt(y1)} L ${fmt(x0)} ${fmt(y0)} L ${fmt(x1)} ${fmt(y0)}" stroke="black" fill="none"/>`,
  );

  // y ticks: decades
  for (const d of decadeTicks(yLo, yHi)) {
    const y = ym.at(d);
    parts.push(`<line x1="${fmt(x0 - 4)}" y1="${fmt(y)}" x2="${fmt(x0)}" y2="${fmt(y)}" stroke="black"/>`);
    parts.push(`<line x1="${fmt(x0)}" y1="${fmt(y)}" x2="${fmt(x1)}" y2="${fmt(y)}" stroke="#dddddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${fmt(x0 - 7)}" y="${fmt(y + 3.5)}" text-anchor="end">${powLabel(d)}</text>`);
  }
  // x ticks
  const xTicks = input.scale === "loglog" ? decadeTicks(xLo, xHi, 6) : linearTicks(Math.max(0, xLo), xHi);
  for (const t of xTicks) {
    const x = xm.at(t);
    const label = input.scale === "loglog" ? powLabel(t) : String(Math.round(t));
    parts.push(`<line x1="${fmt(x)}" y1="${fmt(y0)}" x2="${fmt(x)}" y2="${fmt(y0 + 4)}" stroke="black"/>`);
    parts.push(`<text x="${fmt(x)}" y="${fmt(y0 + 16)}" text-anchor="middle">${label}</text>`);
  }
  parts.push(`<text x="${fmt((x0 + x1) / 2)}" y="${fmt(height - 10)}" text-anchor="middle">mode index k</text>`);
  parts.push(
    `<text x="16" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">&lt;E_k&gt;</text>`,
  );

  // guide line (k^exponent through an anchor)
  if (input.guide) {
    if (input.scale !== "loglog") throw new ArtifactError("guide lines need a loglog figure");
    const [ka, ea] = input.guide.through;
    const c = Math.log10(ea) - input.guide.exponent * Math.log10(ka);
    const gx0 = Math.max(xLo, Math.log10(ka) - 1.2);
    const gx1 = Math.min(xHi, Math.log10(ka) + 1.2);
    const gy0 = input.guide.exponent * gx0 + c;
    const gy1 = input.guide.exponent * gx1 + c;
    parts.push(
      `<line x1="${fmt(xm.at(gx0))}" y1="${fmt(ym.at(gy0))}" x2="${fmt(xm.at(gx1))}" y2="${fmt(ym.at(gy1))}" stroke="#555555" stroke-width="1" stroke-dasharray="2 3"/>`,
    );
    parts.push(
      `<text x="${fmt(xm.at(gx1) - 4)}" y="${fmt(ym.at(gy1) - 5)}" text-anchor="end" fill="#555555">${input.guide.label ?? `k^${input.guide.exponent}`}</text>`,
    );
  }

  // series markers + fit overlays + legend
  input.series.forEach((s, idx) => {
    const color = s.color ?? COLORS[idx % COLORS.length];
    const kind = s.marker ?? "dot";
    for (const pt of perSeries[idx]) parts.push(markerAt(xm.at(pt.x), ym.at(pt.y), kind, color));
    if (s.fit) {
      for (const line of s.fit.lines) parts.push(fitPath(line, input.scale, xm, ym, color));
    }
    const ly = y1 + 14 * idx + 4;
    const lx = x1 - 150;
    parts.push(markerAt(lx + 6, ly, kind, color));
    parts.push(`<text x="${fmt(lx + 16)}" y="${fmt(ly + 3.5)}">${s.label ?? `series ${idx + 1}`}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
