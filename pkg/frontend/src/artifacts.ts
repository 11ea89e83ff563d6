/**
 * Readers for the kgchain CSV/JSON artifacts.
 *
 * CSVs carry `# key: value` provenance comments (config_hash among them)
 * ahead of the header row; fit reports are plain JSON with a config_hash
 * field.  Figures must never mix artifacts of different lineage, so both
 * readers surface the hash for the renderer to compare.
 */

export interface SpectrumData {
  comments: Record<string, string>;
  configHash: string | undefined;
  k: number[];
  eAvg: number[];
  columns: Record<string, number[]>;
}

export interface FitLine {
  kind: "exponential" | "powerlaw";
  slope: number;
  intercept: number; // natural-log intercept, matching the fitter
  window: [number, number];
}

export interface FitReport {
  configHash: string | undefined;
  kind: string;
  kStar: number | null;
  crossoverEnergy: number | null;
  lines: FitLine[];
}

export class ArtifactError extends Error {}

export function parseSpectrumCsv(text: string, name = "spectrum"): SpectrumData {
  const comments: Record<string, string> = {};
  let header: string[] | null = null;
  const rows: number[][] = [];
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const m = line.slice(1).match(/^\s*([^:]+):\s*(.*)$/);
      if (m) comments[m[1].trim()] = m[2].trim();
      continue;
    }
    if (!header) {
      header = line.split(",").map((s) => s.trim());
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new ArtifactError(`${name}:${i + 1}: expected ${header.length} fields`);
    }
    const row = parts.map(Number);
    if (row.some((v) => Number.isNaN(v))) {
      throw new ArtifactError(`${name}:${i + 1}: non-numeric field`);
    }
    rows.push(row);
  }
  if (!header) throw new ArtifactError(`${name}: no header row`);
  const columns: Record<string, number[]> = {};
  header.forEach((col, j) => {
    columns[col] = rows.map((r) => r[j]);
  });
  if (!columns["k"] || !columns["E_avg"]) {
    throw new ArtifactError(`${name}: missing k/E_avg columns`);
  }
  return {
    comments,
    configHash: comments["config_hash"],
    k: columns["k"],
    eAvg: columns["E_avg"],
    columns,
  };
}

interface RawFitDoc {
  config_hash?: string;
  kind?: string;
  slope?: number;
  intercept?: number;
  window?: [number, number];
  k_star?: number | null;
  crossover_energy?: number | null;
  head?: RawFitDoc;
  tail?: RawFitDoc;
}

function lineOf(doc: RawFitDoc): FitLine | null {
  if (
    (doc.kind === "exponential" || doc.kind === "powerlaw") &&
    typeof doc.slope === "number" &&
    typeof doc.intercept === "number" &&
    Array.isArray(doc.window)
  ) {
    return {
      kind: doc.kind,
      slope: doc.slope,
      intercept: doc.intercept,
      window: [doc.window[0], doc.window[1]],
    };
  }
  return null;
}

export function parseFitReport(text: string, name = "fit"): FitReport {
  let doc: RawFitDoc;
  try {
    doc = JSON.parse(text) as RawFitDoc;
  } catch (err) {
    throw new ArtifactError(`${name}: malformed JSON (${String(err)})`);
  }
  const lines: FitLine[] = [];
  for (const part of [doc, doc.head, doc.tail]) {
    if (!part) continue;
    const line = lineOf(part);
    if (line) lines.push(line);
  }
  return {
    configHash: doc.config_hash,
    kind: doc.kind ?? "unknown",
    kStar: doc.k_star ?? null,
    crossoverEnergy: doc.crossover_energy ?? null,
    lines,
  };
}
