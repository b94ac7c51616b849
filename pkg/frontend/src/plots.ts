import { ReportRow, SchemaError } from "./csv.js";
import { kernelDensity, log10, median } from "./stats.js";
import { PALETTE, document as svgDocument, el, round2, text } from "./svg.js";

export type FigureKind = "violin" | "ratio-curves";

export interface PlotJob {
  rows: ReportRow[];
  kind: FigureKind;
  title?: string;
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 36, right: 24, bottom: 46, left: 64 };

interface Scale {
  (v: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

function finiteGains(rows: ReportRow[]): ReportRow[] {
  return rows.filter((r) => Number.isFinite(r.gain) && r.gain > 0);
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(lo); e <= Math.ceil(hi); e++) ticks.push(e);
  return ticks;
}

function yAxis(scale: Scale, lo: number, hi: number): string[] {
  const parts: string[] = [];
  for (const e of logTicks(lo, hi)) {
    const y = round2(scale(e));
    parts.push(
      el("line", {
        x1: MARGIN.left, x2: WIDTH - MARGIN.right, y1: y, y2: y,
        stroke: "#dddddd", "stroke-width": 1,
      })
    );
    parts.push(
      text(`1e${e}`, {
        x: MARGIN.left - 8, y: y + 4, "text-anchor": "end",
        "font-size": 11, fill: "#444444", "font-family": "sans-serif",
      })
    );
  }
  parts.push(
    text("gain (log scale)", {
      x: 14, y: round2((MARGIN.top + HEIGHT - MARGIN.bottom) / 2),
      "font-size": 12, fill: "#222222", "font-family": "sans-serif",
      transform: `rotate(-90 14 ${round2((MARGIN.top + HEIGHT - MARGIN.bottom) / 2)})`,
    })
  );
  return parts;
}

export function renderViolin(job: PlotJob): string {
  const rows = finiteGains(job.rows);
  if (rows.length === 0) throw new SchemaError("no finite gains to plot");
  const groups = new Map<string, number[]>();
  for (const r of rows) {
    const key = `${r.engine} N=${r.N}`;
    if (!groups.has(key)) groups.set(key, []);
    groups.get(key)!.push(log10(r.gain));
  }
  const keys = [...groups.keys()].sort();
  const all = rows.map((r) => log10(r.gain));
  const lo = Math.min(...all) - 0.25;
  const hi = Math.max(...all) + 0.25;
  const yScale = linearScale(hi, lo, MARGIN.top, HEIGHT - MARGIN.bottom);

  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const slot = innerW / keys.length;
  const halfWidth = Math.min(slot * 0.38, 60);

  const parts = yAxis(yScale, lo, hi);
  keys.forEach((key, i) => {
    const values = groups.get(key)!;
    const cx = MARGIN.left + slot * (i + 0.5);
    const { x, density } = kernelDensity(values, lo, hi);
    const dMax = Math.max(...density, 1e-12);
    const right = x.map(
      (g, j) => `${round2(cx + (halfWidth * density[j]) / dMax)},${round2(yScale(g))}`
    );
    const left = x
      .map((g, j) => `${round2(cx - (halfWidth * density[j]) / dMax)},${round2(yScale(g))}`)
      .reverse();
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      el("polygon", {
        points: [...right, ...left].join(" "),
        fill: color, "fill-opacity": 0.55, stroke: color,
        class: "violin", "data-series": key,
      })
    );
    const med = round2(yScale(median(values)));
    parts.push(
      el("line", {
        x1: round2(cx - halfWidth), x2: round2(cx + halfWidth), y1: med, y2: med,
        stroke: "#222222", "stroke-width": 1.5,
      })
    );
    parts.push(
      text(key, {
        x: round2(cx), y: HEIGHT - MARGIN.bottom + 18, "text-anchor": "middle",
        "font-size": 11, fill: "#222222", "font-family": "sans-serif",
      })
    );
  });
  if (job.title) {
    parts.push(
      text(job.title, {
        x: WIDTH / 2, y: 20, "text-anchor": "middle",
        "font-size": 13, fill: "#111111", "font-family": "sans-serif",
      })
    );
  }
  return svgDocument(WIDTH, HEIGHT, parts);
}

export function renderRatioCurves(job: PlotJob): string {
  const rows = finiteGains(job.rows);
  if (rows.length === 0) throw new SchemaError("no finite gains to plot");
  const groups = new Map<string, ReportRow[]>();
  for (const r of rows) {
    const key = `${r.engine} N=${r.N}`;
    if (!groups.has(key)) groups.set(key, []);
    groups.get(key)!.push(r);
  }
  const keys = [...groups.keys()].sort();
  const ts = rows.map((r) => r.t);
  const gains = rows.map((r) => log10(r.gain));
  const lo = Math.min(...gains, 0) - 0.25;
  const hi = Math.max(...gains) + 0.25;
  const xScale = linearScale(Math.min(...ts), Math.max(...ts), MARGIN.left, WIDTH - MARGIN.right);
  const yScale = linearScale(hi, lo, MARGIN.top, HEIGHT - MARGIN.bottom);

  const parts = yAxis(yScale, lo, hi);
  parts.push(
    text("t", {
      x: WIDTH - MARGIN.right, y: HEIGHT - 12, "text-anchor": "end",
      "font-size": 12, fill: "#222222", "font-family": "sans-serif",
    })
  );
  keys.forEach((key, i) => {
    const series = groups.get(key)!.slice().sort((a, b) => a.t - b.t);
    const color = PALETTE[i % PALETTE.length];
    const points = series
      .map((r) => `${round2(xScale(r.t))},${round2(yScale(log10(r.gain)))}`)
      .join(" ");
    parts.push(
      el("polyline", {
        points, fill: "none", stroke: color, "stroke-width": 1.6,
        class: "series", "data-series": key,
      })
    );
    parts.push(
      text(key, {
        x: WIDTH - MARGIN.right - 6,
        y: MARGIN.top + 14 * (i + 1),
        "text-anchor": "end", "font-size": 11, fill: color, "font-family": "sans-serif",
        class: "legend",
      })
    );
  });
  if (job.title) {
    parts.push(
      text(job.title, {
        x: WIDTH / 2, y: 20, "text-anchor": "middle",
        "font-size": 13, fill: "#111111", "font-family": "sans-serif",
      })
    );
  }
  return svgDocument(WIDTH, HEIGHT, parts);
}

export function render(job: PlotJob): string {
  return job.kind === "violin" ? renderViolin(job) : renderRatioCurves(job);
}
