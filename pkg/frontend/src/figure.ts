/**
 * Builds figure series from result rows and renders them as SVG.
 *
 * The renderer performs no numeric computation beyond the axis transforms:
 * every plotted value is the excess_var cell exactly as parsed. On the
 * logarithmic axis, values at or below the clip floor are drawn at the
 * floor and flagged; the underlying data point keeps its exact value.
 */

import { ResultRow } from "./csv";

export type FigureKind = "excess_variance" | "trim_variance";
export type XAxis = "m" | "fraction";

export interface FigureSpec {
  kind: FigureKind;
  xAxis?: XAxis;
  clipFloor?: number; // log-axis floor for nonpositive cells
  title?: string;
}

export interface SeriesPoint {
  x: number;
  y: number; // exact CSV value, never altered
  clipped: boolean;
}

export interface Series {
  algorithm: string;
  label: string;
  color: string;
  points: SeriesPoint[];
}

export class EmptyPlotError extends Error {
  constructor() {
    super("CSV contains a header but no data rows: nothing to plot");
    this.name = "EmptyPlotError";
  }
}

// display names and a stable ordering for the legend
const SERIES_STYLE: Array<{ algorithm: string; label: string; color: string }> = [
  { algorithm: "lln", label: "LLN", color: "#1f77b4" },
  { algorithm: "uln", label: "ULN", color: "#ff7f0e" },
  { algorithm: "arsinh_normal", label: "arshinhN", color: "#2ca02c" },
  { algorithm: "student_t", label: "Student's T", color: "#d62728" },
  { algorithm: "laplace", label: "Lap", color: "#9467bd" },
  { algorithm: "gaussian", label: "N", color: "#8c564b" },
  { algorithm: "trim_nonprivate", label: "trim non-priv", color: "#17becf" },
  { algorithm: "global_sens", label: "global sens", color: "#7f7f7f" },
  { algorithm: "lower_bound", label: "lower bound", color: "#bcbd22" },
];

const FALLBACK_COLORS = ["#e377c2", "#aec7e8", "#ffbb78", "#98df8a"];

export const DEFAULT_CLIP_FLOOR = 1e-3;

export function buildSeries(rows: ResultRow[], spec: FigureSpec): Series[] {
  if (rows.length === 0) {
    throw new EmptyPlotError();
  }
  const xAxis = spec.xAxis ?? "m";
  const clipFloor = spec.clipFloor ?? DEFAULT_CLIP_FLOOR;
  const logScale = spec.kind === "excess_variance";

  const byAlgorithm = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const bucket = byAlgorithm.get(row.algorithm);
    if (bucket) {
      bucket.push(row);
    } else {
      byAlgorithm.set(row.algorithm, [row]);
    }
  }

  const known = SERIES_STYLE.map((s) => s.algorithm);
  const names = [...byAlgorithm.keys()].sort(
    (a, b) =>
      (known.includes(a) ? known.indexOf(a) : known.length) -
        (known.includes(b) ? known.indexOf(b) : known.length) || a.localeCompare(b),
  );

  let fallback = 0;
  return names.map((name) => {
    const style = SERIES_STYLE.find((s) => s.algorithm === name);
    const color = style?.color ?? FALLBACK_COLORS[fallback++ % FALLBACK_COLORS.length];
    const points = byAlgorithm
      .get(name)!
      .slice()
      .sort((p, q) => p.m - q.m)
      .map((row) => ({
        x: xAxis === "m" ? row.m : row.m / row.n,
        y: row.excessVar,
        clipped: logScale && row.excessVar <= clipFloor,
      }));
    return { algorithm: name, label: style?.label ?? name, color, points };
  });
}

// -------------------------------------------------------------- svg drawing

const WIDTH = 960;
const HEIGHT = 600;
const MARGIN = { top: 48, right: 200, bottom: 56, left: 84 };

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function tickLabel(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-2)) {
    return v.toExponential(0).replace("+", "");
  }
  return Number(v.toPrecision(4)).toString();
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSvg(rows: ResultRow[], spec: FigureSpec): string {
  const series = buildSeries(rows, spec);
  const logScale = spec.kind === "excess_variance";
  const clipFloor = spec.clipFloor ?? DEFAULT_CLIP_FLOOR;

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const plotValue = (p: SeriesPoint): number =>
    logScale ? Math.max(p.y, clipFloor) : p.y;
  const ys = series.flatMap((s) => s.points.map(plotValue));

  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xPad = xMax > xMin ? 0.03 * (xMax - xMin) : 1;
  const yMinRaw = Math.min(...ys);
  const yMaxRaw = Math.max(...ys);

  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;

  let yMin: number;
  let yMax: number;
  if (logScale) {
    yMin = Math.pow(10, Math.floor(Math.log10(yMinRaw)));
    yMax = Math.pow(10, Math.ceil(Math.log10(yMaxRaw)));
    if (yMin === yMax) {
      yMax = yMin * 10;
    }
  } else {
    const pad = yMaxRaw > yMinRaw ? 0.05 * (yMaxRaw - yMinRaw) : 1;
    yMin = yMinRaw - pad;
    yMax = yMaxRaw + pad;
  }

  const sx = (x: number): number =>
    MARGIN.left + ((x - (xMin - xPad)) / (xMax + xPad - (xMin - xPad))) * innerW;
  const sy = (y: number): number => {
    const t = logScale
      ? (Math.log10(y) - Math.log10(yMin)) / (Math.log10(yMax) - Math.log10(yMin))
      : (y - yMin) / (yMax - yMin);
    return MARGIN.top + innerH - t * innerH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  const title =
    spec.title ??
    (spec.kind === "excess_variance"
      ? "Normalized excess variance of the private trimmed mean"
      : "Variance of the trimmed mean");
  parts.push(
    `<text x="${WIDTH / 2}" y="28" text-anchor="middle" font-size="18">${escapeXml(title)}</text>`,
  );

  // y ticks: decades for log, five even steps otherwise
  const yTicks: number[] = [];
  if (logScale) {
    for (let d = Math.log10(yMin); d <= Math.log10(yMax) + 1e-9; d += 1) {
      yTicks.push(Math.pow(10, Math.round(d * 1e9) / 1e9));
    }
  } else {
    for (let i = 0; i <= 5; i++) {
      yTicks.push(yMin + ((yMax - yMin) * i) / 5);
    }
  }
  for (const tick of yTicks) {
    const y = sy(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="12">` +
        `${tickLabel(tick)}</text>`,
    );
  }

  const xTickCount = Math.min(8, new Set(xs).size);
  for (let i = 0; i < xTickCount; i++) {
    const x = xMin + ((xMax - xMin) * i) / Math.max(xTickCount - 1, 1);
    const px = sx(x);
    parts.push(
      `<line x1="${fmt(px)}" y1="${HEIGHT - MARGIN.bottom}" x2="${fmt(px)}" ` +
        `y2="${HEIGHT - MARGIN.bottom + 6}" stroke="black" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(px)}" y="${HEIGHT - MARGIN.bottom + 22}" text-anchor="middle" ` +
        `font-size="12">${tickLabel(x)}</text>`,
    );
  }

  // axes
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
      `y2="${HEIGHT - MARGIN.bottom}" stroke="black" stroke-width="1.5"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${HEIGHT - MARGIN.bottom}" x2="${WIDTH - MARGIN.right}" ` +
      `y2="${HEIGHT - MARGIN.bottom}" stroke="black" stroke-width="1.5"/>`,
  );
  const xLabel = (spec.xAxis ?? "m") === "m" ? "trimming level m" : "trimming fraction m/n";
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${HEIGHT - 14}" text-anchor="middle" ` +
      `font-size="14">${escapeXml(xLabel)}</text>`,
  );
  const yLabel =
    spec.kind === "excess_variance" ? "n * MSE - 1 (log scale)" : "n * MSE - 1";
  parts.push(
    `<text x="20" y="${MARGIN.top + innerH / 2}" text-anchor="middle" font-size="14" ` +
      `transform="rotate(-90 20 ${MARGIN.top + innerH / 2})">${escapeXml(yLabel)}</text>`,
  );

  // series lines, point markers, clipped-point flags
  for (const s of series) {
    const coords = s.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(plotValue(p)))}`);
    if (coords.length > 1) {
      parts.push(
        `<polyline points="${coords.join(" ")}" fill="none" stroke="${s.color}" ` +
          `stroke-width="2"/>`,
      );
    }
    for (const p of s.points) {
      const cx = fmt(sx(p.x));
      const cy = fmt(sy(plotValue(p)));
      if (p.clipped) {
        parts.push(
          `<path d="M ${cx} ${cy} m -5 5 l 5 -10 l 5 10 z" fill="none" ` +
            `stroke="${s.color}" stroke-width="1.5" data-clipped="true"/>`,
        );
      } else {
        parts.push(`<circle cx="${cx}" cy="${cy}" r="3" fill="${s.color}"/>`);
      }
    }
  }

  // legend
  const legendX = WIDTH - MARGIN.right + 16;
  series.forEach((s, i) => {
    const y = MARGIN.top + 10 + i * 24;
    parts.push(
      `<line x1="${legendX}" y1="${y}" x2="${legendX + 26}" y2="${y}" ` +
        `stroke="${s.color}" stroke-width="2" class="legend-swatch"/>`,
    );
    parts.push(
      `<text x="${legendX + 32}" y="${y + 4}" font-size="13" class="legend-label">` +
        `${escapeXml(s.label)}</text>`,
    );
  });
  if (series.some((s) => s.points.some((p) => p.clipped))) {
    const y = MARGIN.top + 10 + series.length * 24;
    parts.push(
      `<text x="${legendX}" y="${y + 4}" font-size="11" fill="#555555">` +
        `open triangles: clipped to ${clipFloor} for the log axis</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
