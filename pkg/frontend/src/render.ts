/**
 * Figure specs on disk: JSON documents pointing at kgchain artifacts.
 *
 * {
 *   "scale": "semilog" | "loglog",
 *   "title": "...",
 *   "series": [
 *     {"spectrum": "runs/dbc/spectrum.csv", "label": "DBC", "marker": "dot",
 *      "parity": "odd", "fit": "runs/dbc/fit_report.json"}
 *   ],
 *   "guide": {"exponent": -6, "through": [31, 1e-10]},
 *   "output": "figs/fig1a.svg"
 * }
 *
 * Paths are resolved relative to the spec file.  Rendering recomputes no
 * physics; the same inputs always produce byte-identical SVG.
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { ArtifactError, parseFitReport, parseSpectrumCsv } from "./artifacts.js";
import { FigureInput, GuideLine, Marker, Parity, renderFigure } from "./figure.js";

export interface SeriesSpecDoc {
  spectrum: string;
  label?: string;
  marker?: Marker;
  parity?: Parity;
  fit?: string;
  color?: string;
}

export interface FigureSpecDoc {
  series: SeriesSpecDoc[];
  scale: "semilog" | "loglog";
  title?: string;
  guide?: GuideLine;
  output?: string;
  width?: number;
  height?: number;
  e_floor?: number;
}

export function loadFigureInput(spec: FigureSpecDoc, baseDir: string): FigureInput {
  if (!Array.isArray(spec.series) || spec.series.length === 0) {
    throw new ArtifactError("figure spec needs a non-empty series list");
  }
  const series = spec.series.map((s) => {
    const csvPath = resolve(baseDir, s.spectrum);
    let csvText: string;
    try {
      csvText = readFileSync(csvPath, "utf8");
    } catch {
      throw new ArtifactError(`missing input: ${csvPath}`);
    }
    const spectrum = parseSpectrumCsv(csvText, s.spectrum);
    let fit;
    if (s.fit) {
      const fitPath = resolve(baseDir, s.fit);
      let fitText: string;
      try {
        fitText = readFileSync(fitPath, "utf8");
      } catch {
        throw new ArtifactError(`missing input: ${fitPath}`);
      }
      fit = parseFitReport(fitText, s.fit);
    }
    return { spectrum, fit, label: s.label, marker: s.marker, parity: s.parity, color: s.color };
  });
  return {
    series,
    scale: spec.scale,
    title: spec.title,
    guide: spec.guide,
    width: spec.width,
    height: spec.height,
    eFloor: spec.e_floor,
  };
}

export function renderSpecFile(specPath: string, outputOverride?: string): string {
  const abs = resolve(specPath);
  const spec = JSON.parse(readFileSync(abs, "utf8")) as FigureSpecDoc;
  const svg = renderFigure(loadFigureInput(spec, dirname(abs)));
  const out = outputOverride ?? spec.output;
  if (out) {
    const target = resolve(dirname(abs), out);
    mkdirSync(dirname(target), { recursive: true });
    writeFileSync(target, svg);
  }
  return svg;
}
