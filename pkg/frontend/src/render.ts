/**
 * Figure kinds over sweep CSVs. All science lives upstream; these scripts
 * only select columns and draw.
 */

import { writeFileSync } from "fs";

import { column, readSweep, seriesLabel, SweepTable, SchemaError } from "./schema.js";
import { ChartSpec, renderChart, renderStacked, Series } from "./svg.js";

export const KINDS = [
  "objective-vs-alpha",
  "params-vs-alpha",
  "threshold-vs-alpha",
  "comparison",
] as const;

export type FigureKind = (typeof KINDS)[number];

export interface FigureRecipe {
  kind: FigureKind;
  inputs: string[];
  out: string;
}

function objectiveSeries(tables: SweepTable[]): Series[] {
  return tables.map((t) => ({
    label: seriesLabel(t),
    x: column(t, "alpha"),
    y: column(t, "objective"),
  }));
}

export function thresholdSeries(table: SweepTable): Series[] {
  if (table.kind !== "soft") {
    throw new SchemaError(`${table.path}: threshold figure needs a soft sweep (no thr_k columns)`);
  }
  const alpha = column(table, "alpha");
  const series: Series[] = [];
  for (let k = 1; k <= table.thresholds; k++) {
    series.push({ label: `thr_${k}`, x: alpha, y: column(table, `thr_${k}`) });
  }
  return series;
}

function paramSeries(table: SweepTable): { powers: Series[]; durations: Series[] } {
  const alpha = column(table, "alpha");
  const named = (names: string[]) =>
    names.map((n) => ({ label: n, x: alpha, y: column(table, n) }));
  if (table.kind === "perfect") {
    return {
      powers: named(["p_free", "p_busy"]),
      durations: named(["t_free", "t_busy"]),
    };
  }
  const levels = table.thresholds + 1;
  const pNames = Array.from({ length: levels }, (_, i) => `p_${i + 1}`);
  const tNames = Array.from({ length: levels }, (_, i) => `t_${i + 1}`);
  return { powers: named(pNames), durations: named(tNames) };
}

export function buildSvg(recipe: FigureRecipe): string {
  if (recipe.inputs.length === 0) {
    throw new SchemaError("no input CSV files given");
  }
  const tables = recipe.inputs.map(readSweep);
  switch (recipe.kind) {
    case "objective-vs-alpha": {
      const spec: ChartSpec = {
        title: "Weighted sum throughput vs alpha",
        xLabel: "alpha",
        yLabel: "(1-alpha) Rs + alpha Rp [nats/time]",
        series: objectiveSeries(tables),
      };
      return renderChart(spec);
    }
    case "comparison": {
      const spec: ChartSpec = {
        title: "Sensing-mode comparison",
        xLabel: "alpha",
        yLabel: "(1-alpha) Rs + alpha Rp [nats/time]",
        series: objectiveSeries(tables),
      };
      return renderChart(spec);
    }
    case "threshold-vs-alpha": {
      if (tables.length !== 1) {
        throw new SchemaError("threshold-vs-alpha takes exactly one soft sweep CSV");
      }
      const spec: ChartSpec = {
        title: "Optimal quantization thresholds vs alpha",
        xLabel: "alpha",
        yLabel: "threshold",
        series: thresholdSeries(tables[0]),
      };
      return renderChart(spec);
    }
    case "params-vs-alpha": {
      if (tables.length !== 1) {
        throw new SchemaError("params-vs-alpha takes exactly one sweep CSV");
      }
      const { powers, durations } = paramSeries(tables[0]);
      return renderStacked(
        {
          title: `Optimal transmit powers (${seriesLabel(tables[0])})`,
          xLabel: "alpha",
          yLabel: "power",
          series: powers,
        },
        {
          title: `Optimal transmission durations (${seriesLabel(tables[0])})`,
          xLabel: "alpha",
          yLabel: "duration",
          series: durations,
        },
      );
    }
  }
}

/** Render a figure; the output file is written only after a successful build. */
export function render(recipe: FigureRecipe): void {
  const svg = buildSvg(recipe);
  writeFileSync(recipe.out, svg);
}
