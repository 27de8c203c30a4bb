import { describe, expect, it } from "vitest";

import { chartGeometry, polylinePoints, renderChart } from "../src/chart.js";
import { REV0 } from "./views.js";

const c15 = REV0.candidates[0];
const c2 = REV0.candidates[1];

describe("chart geometry", () => {
  it("spans the meta profile when nothing is selected", () => {
    const geo = chartGeometry(REV0, null);
    expect(geo.xMin).toBe(0);
    expect(geo.xMax).toBe(60); // 61 samples at 1 mm
  });

  it("extends left for an overlay with a negative start", () => {
    expect(c2.overlay!.start_mm).toBe(-6);
    const geo = chartGeometry(REV0, c2);
    expect(geo.xMin).toBe(-6);
    expect(geo.xMax).toBe(60);
  });

  it("keeps a degenerate extent finite", () => {
    const flat = structuredClone(REV0);
    flat.meta.samples_mm = [5, 5, 5];
    const geo = chartGeometry(flat, null);
    expect(geo.yMax).toBeGreaterThan(geo.yMin);
  });
});

describe("polyline mapping", () => {
  it("emits one point per sample", () => {
    const geo = chartGeometry(REV0, c15);
    const meta = polylinePoints(
      { startMm: 0, stepMm: 1, samples: REV0.meta.samples_mm },
      geo,
    );
    expect(meta.split(" ")).toHaveLength(61);
  });

  it("shifts the overlay to its proposed offset", () => {
    const geo = chartGeometry(REV0, c15);
    const overlay = polylinePoints(
      {
        startMm: c15.overlay!.start_mm,
        stepMm: 1,
        samples: c15.overlay!.samples_mm,
      },
      geo,
    );
    const points = overlay.split(" ");
    expect(points).toHaveLength(15);
    const x0 = Number(points[0].split(",")[0]);
    // start_mm 13 of 60 across the plot width (pad 28, width 640)
    const expected = geo.pad + (13 / 60) * (geo.width - 2 * geo.pad);
    expect(x0).toBeCloseTo(expected, 1);
  });
});

describe("renderChart", () => {
  it("draws the meta line alone without a selection", () => {
    const svg = renderChart(document, REV0, null);
    expect(svg.querySelectorAll("polyline")).toHaveLength(1);
    expect(svg.querySelector(".meta-line")).not.toBeNull();
    expect(svg.querySelector(".overlay-line")).toBeNull();
  });

  it("adds the overlay for the selected candidate", () => {
    const svg = renderChart(document, REV0, c15);
    expect(svg.querySelectorAll("polyline")).toHaveLength(2);
    const overlay = svg.querySelector(".overlay-line")!;
    expect(overlay.getAttribute("points")!.split(" ")).toHaveLength(15);
  });
});
