import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  barChart,
  barSegments,
  biplot,
  hullPath,
  linearScale,
  ternaryPlot,
} from "../src/plots.js";
import type { AmalgamatedDoc, OrdinationDoc, TernaryDoc } from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8"),
  ) as T;
}

const amalgamated = fixture<AmalgamatedDoc>("amalgamated.json");
const ternary = fixture<TernaryDoc>("ternary.json");
const pcaSlr = fixture<OrdinationDoc>("ordination_pca_slr.json");

describe("stacked bars", () => {
  const bars = barSegments(amalgamated);

  it("builds one bar per sample with one segment per root group", () => {
    expect(bars).toHaveLength(42);
    expect(bars.every((b) => b.segments.length === 3)).toBe(true);
  });

  it("stacks every bar to exactly 100", () => {
    for (const bar of bars) {
      expect(bar.segments[bar.segments.length - 1].to).toBeCloseTo(100, 9);
      expect(bar.segments[0].from).toBe(0);
    }
  });

  it("keeps the raw service values on hover", () => {
    const svg = barChart(amalgamated);
    expect(svg).toContain(`: ${amalgamated.rows[0][0]}`);
  });

  it("carries the season labels through", () => {
    expect(new Set(bars.map((b) => b.group))).toEqual(
      new Set(["winter", "spring", "summer"]),
    );
  });
});

describe("ternary view", () => {
  it("plots every sample inside the triangle", () => {
    for (const p of ternary.points) {
      expect(p.x).toBeGreaterThanOrEqual(-1e-9);
      expect(p.x).toBeLessThanOrEqual(1 + 1e-9);
      expect(p.y).toBeGreaterThanOrEqual(-1e-9);
      expect(p.y).toBeLessThanOrEqual(Math.sqrt(3) / 2 + 1e-9);
    }
  });

  it("renders one marker per sample and the three vertex labels", () => {
    const svg = ternaryPlot(ternary);
    expect(svg.match(/<circle/g)).toHaveLength(42);
    for (const vertex of ternary.vertices) {
      expect(svg).toContain(`>${vertex}</text>`);
    }
  });
});

describe("biplot", () => {
  it("draws hulls in the service-provided vertex order", () => {
    const order = [3, 1, 2];
    const coords = order.map((i) => [i * 10, i * 20] as [number, number]);
    const path = hullPath(coords);
    expect(path).toBe("M 30.00 60.00 L 10.00 20.00 L 20.00 40.00 Z");
  });

  it("renders one hull per season and one marker per sample", () => {
    const svg = biplot(pcaSlr);
    expect(svg.match(/<path d="M/g)).toHaveLength(3);
    expect(svg.match(/<circle/g)).toHaveLength(42);
  });

  it("annotates the axes with the service's dimension percentages", () => {
    const svg = biplot(pcaSlr);
    expect(svg).toContain(`dim1 (${pcaSlr.dim_percentages[0].toFixed(1)}%)`);
    expect(svg).toContain(`dim2 (${pcaSlr.dim_percentages[1].toFixed(1)}%)`);
  });

  it("labels every committed logratio as a variable axis", () => {
    const svg = biplot(pcaSlr);
    expect(pcaSlr.variables).toHaveLength(7);
    for (const variable of pcaSlr.variables) {
      expect(svg).toContain(
        variable.name.replace(/&/g, "&amp;").replace(/</g, "&lt;"),
      );
    }
  });
});

describe("scales", () => {
  it("maps the domain ends onto the range ends", () => {
    const scale = linearScale(0, 10, 100, 200);
    expect(scale(0)).toBe(100);
    expect(scale(10)).toBe(200);
    expect(scale(5)).toBe(150);
  });

  it("tolerates a degenerate domain", () => {
    const scale = linearScale(4, 4, 0, 100);
    expect(Number.isFinite(scale(4))).toBe(true);
  });
});
