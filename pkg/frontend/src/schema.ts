/**
 * Parsing and validation for cogduty sweep CSVs.
 *
 * Files start with `# key = value` metadata lines, then a header row,
 * then numeric rows. Two sweep schemas exist:
 *
 *   perfect: alpha,objective,rate_s,rate_p,p_free,t_free,p_busy,t_busy,p_ss,mu
 *   soft:    alpha,objective,rate_s,rate_p,thr_1..thr_S,p_1..p_{S+1},t_1..t_{S+1},p_ss,mu
 */

import { readFileSync } from "fs";

export class SchemaError extends Error {}

export interface SweepTable {
  path: string;
  meta: Record<string, string>;
  columns: string[];
  rows: number[][];
  kind: "perfect" | "soft";
  /** number of thresholds S (0 for perfect sweeps) */
  thresholds: number;
}

export function column(table: SweepTable, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`${table.path}: missing column '${name}'`);
  }
  return table.rows.map((r) => r[idx]);
}

const PERFECT_COLUMNS = [
  "alpha", "objective", "rate_s", "rate_p",
  "p_free", "t_free", "p_busy", "t_busy", "p_ss", "mu",
];

function softColumns(s: number): string[] {
  const cols = ["alpha", "objective", "rate_s", "rate_p"];
  for (let k = 1; k <= s; k++) cols.push(`thr_${k}`);
  for (let k = 1; k <= s + 1; k++) cols.push(`p_${k}`);
  for (let k = 1; k <= s + 1; k++) cols.push(`t_${k}`);
  cols.push("p_ss", "mu");
  return cols;
}

function classify(path: string, columns: string[]): { kind: "perfect" | "soft"; thresholds: number } {
  if (columns.length === PERFECT_COLUMNS.length && columns.every((c, i) => c === PERFECT_COLUMNS[i])) {
    return { kind: "perfect", thresholds: 0 };
  }
  const s = columns.filter((c) => /^thr_\d+$/.test(c)).length;
  if (s > 0) {
    const expected = softColumns(s);
    for (let i = 0; i < expected.length; i++) {
      if (columns[i] !== expected[i]) {
        throw new SchemaError(
          `${path}: column ${i + 1} is '${columns[i] ?? "(missing)"}', expected '${expected[i]}'`,
        );
      }
    }
    if (columns.length !== expected.length) {
      throw new SchemaError(`${path}: unexpected trailing column '${columns[expected.length]}'`);
    }
    return { kind: "soft", thresholds: s };
  }
  // name the first column that breaks the perfect schema
  for (let i = 0; i < PERFECT_COLUMNS.length; i++) {
    if (columns[i] !== PERFECT_COLUMNS[i]) {
      throw new SchemaError(
        `${path}: column ${i + 1} is '${columns[i] ?? "(missing)"}', expected '${PERFECT_COLUMNS[i]}'`,
      );
    }
  }
  throw new SchemaError(`${path}: unexpected trailing column '${columns[PERFECT_COLUMNS.length]}'`);
}

export function readSweep(path: string): SweepTable {
  const text = readFileSync(path, "utf8");
  const meta: Record<string, string> = {};
  let columns: string[] | null = null;
  const rows: number[][] = [];

  for (const rawLine of text.split("\n")) {
    const line = rawLine.trimEnd();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      const eq = line.indexOf("=");
      if (eq > 0) {
        meta[line.slice(1, eq).trim()] = line.slice(eq + 1).trim();
      }
      continue;
    }
    if (columns === null) {
      columns = line.split(",");
      continue;
    }
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${rows.length + 1} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    const parsed = cells.map((cell, i) => {
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`${path}: non-numeric value '${cell}' in column '${columns![i]}'`);
      }
      return value;
    });
    rows.push(parsed);
  }

  if (columns === null) {
    throw new SchemaError(`${path}: no header row found`);
  }
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const { kind, thresholds } = classify(path, columns);
  return { path, meta, columns, rows, kind, thresholds };
}

/** Short label for a legend: mode plus distinguishing metadata. */
export function seriesLabel(table: SweepTable): string {
  const parts: string[] = [];
  if (table.meta["mode"]) parts.push(table.meta["mode"]);
  else parts.push(table.kind);
  if (table.kind === "soft") {
    if (table.meta["gamma0"]) parts.push(`g0=${table.meta["gamma0"]}`);
    parts.push(`S=${table.thresholds}`);
  } else if (table.meta["g_sp"]) {
    parts.push(`g_sp=${table.meta["g_sp"]}`);
  }
  return parts.join(" ");
}
