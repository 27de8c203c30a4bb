/**
 * SVG profile chart: the merged thickness curve, with the selected
 * candidate's profile drawn at its proposed offset on the same axes.
 * No chart library; two polylines and a baseline are enough here, and the
 * output stays inspectable in tests.
 */

import type { CandidateView, SessionView } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartGeometry {
  width: number;
  height: number;
  pad: number;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

interface Series {
  startMm: number;
  stepMm: number;
  samples: number[];
}

function extent(values: number[]): [number, number] {
  let lo = values[0] ?? 0;
  let hi = values[0] ?? 1;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

/** Shared axes covering the meta profile plus an optional overlay. */
export function chartGeometry(
  view: SessionView,
  selected: CandidateView | null,
  width = 640,
  height = 220,
): ChartGeometry {
  const series: Series[] = [metaSeries(view)];
  const overlay = overlaySeries(view, selected);
  if (overlay) series.push(overlay);

  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of series) {
    xMin = Math.min(xMin, s.startMm);
    xMax = Math.max(xMax, s.startMm + (s.samples.length - 1) * s.stepMm);
    const [lo, hi] = extent(s.samples);
    yMin = Math.min(yMin, lo);
    yMax = Math.max(yMax, hi);
  }
  if (yMax - yMin < 1e-9) yMax = yMin + 1; // flat profile: keep the scale finite
  if (xMax - xMin < 1e-9) xMax = xMin + 1;
  return { width, height, pad: 28, xMin, xMax, yMin, yMax };
}

function metaSeries(view: SessionView): Series {
  return { startMm: 0, stepMm: view.meta.step_mm, samples: view.meta.samples_mm };
}

function overlaySeries(view: SessionView, selected: CandidateView | null): Series | null {
  if (!selected || !selected.overlay) return null;
  return {
    startMm: selected.overlay.start_mm,
    stepMm: view.meta.step_mm,
    samples: selected.overlay.samples_mm,
  };
}

/** "x,y x,y ..." for an SVG polyline, mapped through the shared axes. */
export function polylinePoints(series: Series, geo: ChartGeometry): string {
  const plotW = geo.width - 2 * geo.pad;
  const plotH = geo.height - 2 * geo.pad;
  const pts: string[] = [];
  for (let i = 0; i < series.samples.length; i++) {
    const xMm = series.startMm + i * series.stepMm;
    const yMm = series.samples[i] as number;
    const x = geo.pad + ((xMm - geo.xMin) / (geo.xMax - geo.xMin)) * plotW;
    const y = geo.height - geo.pad - ((yMm - geo.yMin) / (geo.yMax - geo.yMin)) * plotH;
    pts.push(`${x.toFixed(2)},${y.toFixed(2)}`);
  }
  return pts.join(" ");
}

export function renderChart(
  doc: Document,
  view: SessionView,
  selected: CandidateView | null,
): SVGSVGElement {
  const geo = chartGeometry(view, selected);
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${geo.width} ${geo.height}`);
  svg.setAttribute("class", "profile-chart");

  const frame = doc.createElementNS(SVG_NS, "rect");
  frame.setAttribute("x", String(geo.pad));
  frame.setAttribute("y", String(geo.pad));
  frame.setAttribute("width", String(geo.width - 2 * geo.pad));
  frame.setAttribute("height", String(geo.height - 2 * geo.pad));
  frame.setAttribute("class", "chart-frame");
  svg.appendChild(frame);

  const meta = doc.createElementNS(SVG_NS, "polyline");
  meta.setAttribute("points", polylinePoints(metaSeries(view), geo));
  meta.setAttribute("class", "meta-line");
  svg.appendChild(meta);

  const overlay = overlaySeries(view, selected);
  if (overlay) {
    const line = doc.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", polylinePoints(overlay, geo));
    line.setAttribute("class", "overlay-line");
    svg.appendChild(line);
  }
  return svg;
}
