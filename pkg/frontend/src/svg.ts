/**
 * Minimal deterministic SVG line charts: fixed canvas, linear scales,
 * one polyline per series, legend in the top-right. No runtime deps.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 800;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 24, bottom: 56, left: 72 };
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const fmt = (v: number) => {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(3);
  return s.replace(/\.?0+$/, "") || "0";
};

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (lo === hi) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = (span / n) / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const tick = step * factor;
  const start = Math.ceil(lo / tick) * tick;
  const ticks: number[] = [];
  for (let v = start; v <= hi + tick * 1e-9; v += tick) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function renderChart(spec: ChartSpec): string {
  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  if (xs.length === 0) {
    throw new Error(`chart '${spec.title}' has no points`);
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (xLo === xHi) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  if (yLo === yHi) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const pad = (yHi - yLo) * 0.05;
  yLo -= pad;
  yHi += pad;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${spec.title}</text>`,
  );

  for (const t of niceTicks(xLo, xHi)) {
    const x = sx(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + plotH}" stroke="#ddd"/>`,
      `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  for (const t of niceTicks(yLo, yHi)) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${spec.xLabel}</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${spec.yLabel}</text>`,
  );

  spec.series.forEach((series, i) => {
    const color = COLORS[i % COLORS.length];
    const points = series.x.map((v, j) => `${fmt(sx(v))},${fmt(sy(series.y[j]))}`).join(" ");
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="2" data-label="${series.label}" points="${points}"/>`,
    );
    const ly = MARGIN.top + 16 + i * 18;
    parts.push(
      `<line x1="${WIDTH - 190}" y1="${ly - 4}" x2="${WIDTH - 166}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${WIDTH - 160}" y="${ly}" font-size="12">${series.label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Two stacked charts in one SVG document (powers above durations). */
export function renderStacked(top: ChartSpec, bottom: ChartSpec): string {
  const a = renderChart(top).replace(/<svg[^>]*>/, "").replace("</svg>\n", "");
  const b = renderChart(bottom).replace(/<svg[^>]*>/, "").replace("</svg>\n", "");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT * 2}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT * 2}" font-family="sans-serif">\n` +
    `<g>${a}</g>\n<g transform="translate(0 ${HEIGHT})">${b}</g>\n</svg>\n`
  );
}
