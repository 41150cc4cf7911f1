import { escapeXml, pct1 } from "./format.js";
import type { AmalgamatedDoc, OrdinationDoc, TernaryDoc } from "./types.js";

/** SVG builders for the three plot views.
 *
 * Everything here is presentation geometry: values, hull vertex orders and
 * axis percentages come straight from the service documents. The builders
 * are pure string functions so the rendering is unit-testable without a DOM.
 */

export const GROUP_COLORS = [
  "#2563eb",
  "#dc2626",
  "#059669",
  "#d97706",
  "#7c3aed",
  "#0891b2",
];

export const PART_COLORS = [
  "#94a3b8",
  "#fbbf24",
  "#34d399",
  "#60a5fa",
  "#f472b6",
  "#a78bfa",
];

export function groupColor(groups: string[], group: string | null): string {
  if (group === null) {
    return GROUP_COLORS[0];
  }
  const index = groups.indexOf(group);
  return GROUP_COLORS[(index < 0 ? 0 : index) % GROUP_COLORS.length];
}

export interface Scale {
  (value: number): number;
}

export function linearScale(
  domainMin: number,
  domainMax: number,
  rangeMin: number,
  rangeMax: number,
): Scale {
  const span = domainMax - domainMin || 1;
  return (value: number) =>
    rangeMin + ((value - domainMin) / span) * (rangeMax - rangeMin);
}

export function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

// -- stacked bars over the amalgamated composition --------------------------

export interface BarSegment {
  part: string;
  value: number;
  from: number;
  to: number;
}

export interface BarVM {
  label: string;
  group: string | null;
  total: number;
  segments: BarSegment[];
}

export function barSegments(doc: AmalgamatedDoc): BarVM[] {
  return doc.rows.map((row, i) => {
    const total = row.reduce((s, v) => s + v, 0);
    let cursor = 0;
    const segments = row.map((value, j) => {
      const from = cursor;
      cursor += total > 0 ? (100 * value) / total : 0;
      return { part: doc.parts[j], value, from, to: cursor };
    });
    return {
      label: doc.labels[i],
      group: doc.groups ? doc.groups[i] : null,
      total,
      segments,
    };
  });
}

export function barChart(doc: AmalgamatedDoc, width = 760, height = 260): string {
  const bars = barSegments(doc);
  const margin = { top: 16, right: 10, bottom: 34, left: 36 };
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;
  const barW = innerW / Math.max(1, bars.length);
  const y = linearScale(0, 100, margin.top + innerH, margin.top);

  const pieces: string[] = [];
  bars.forEach((bar, i) => {
    const x = margin.left + i * barW;
    bar.segments.forEach((seg, j) => {
      const top = y(seg.to);
      const h = y(seg.from) - y(seg.to);
      pieces.push(
        `<rect x="${x.toFixed(2)}" y="${top.toFixed(2)}" ` +
          `width="${Math.max(0.5, barW - 1).toFixed(2)}" height="${h.toFixed(2)}" ` +
          `fill="${PART_COLORS[j % PART_COLORS.length]}">` +
          `<title>${escapeXml(bar.label)} ${escapeXml(seg.part)}: ${seg.value}</title></rect>`,
      );
    });
    if (bar.group !== null) {
      pieces.push(
        `<rect x="${x.toFixed(2)}" y="${(margin.top + innerH + 4).toFixed(2)}" ` +
          `width="${Math.max(0.5, barW - 1).toFixed(2)}" height="6" ` +
          `fill="${groupColor(uniqueGroups(doc.groups), bar.group)}">` +
          `<title>${escapeXml(bar.group)}</title></rect>`,
      );
    }
  });
  const legend = doc.parts
    .map(
      (part, j) =>
        `<g transform="translate(${margin.left + j * 110}, ${height - 12})">` +
        `<rect width="10" height="10" fill="${PART_COLORS[j % PART_COLORS.length]}"/>` +
        `<text x="14" y="9" class="legend">${escapeXml(part)}</text></g>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
    pieces.join("") +
    legend +
    `</svg>`
  );
}

function uniqueGroups(groups: string[] | null): string[] {
  return groups ? [...new Set(groups)].sort() : [];
}

// -- ternary view ------------------------------------------------------------

export function ternaryPlot(doc: TernaryDoc, size = 420): string {
  const margin = 36;
  const side = size - 2 * margin;
  const h = (Math.sqrt(3) / 2) * side;
  const toPx = (x: number, y: number): [number, number] => [
    margin + x * side,
    margin + h - y * side,
  ];
  const [ax, ay] = toPx(0, 0);
  const [bx, by] = toPx(1, 0);
  const [cx, cy] = toPx(0.5, Math.sqrt(3) / 2);
  const groups = uniqueGroups(doc.points.map((p) => p.group ?? ""));

  const points = doc.points
    .map((p) => {
      const [px, py] = toPx(p.x, p.y);
      return (
        `<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="4" ` +
        `fill="${groupColor(groups, p.group ?? "")}" fill-opacity="0.85">` +
        `<title>${escapeXml(p.label)}${p.group ? ` (${escapeXml(p.group)})` : ""}</title></circle>`
      );
    })
    .join("");
  const labels =
    `<text x="${ax - 6}" y="${ay + 16}" text-anchor="end" class="vertex">${escapeXml(doc.vertices[0])}</text>` +
    `<text x="${bx + 6}" y="${by + 16}" class="vertex">${escapeXml(doc.vertices[1])}</text>` +
    `<text x="${cx}" y="${cy - 10}" text-anchor="middle" class="vertex">${escapeXml(doc.vertices[2])}</text>`;
  return (
    `<svg viewBox="0 0 ${size} ${margin + h + 2 * margin}" xmlns="http://www.w3.org/2000/svg">` +
    `<polygon points="${ax},${ay} ${bx},${by} ${cx},${cy}" fill="none" stroke="#475569"/>` +
    points +
    labels +
    `</svg>`
  );
}

// -- biplot with group hulls --------------------------------------------------

export function hullPath(coords: [number, number][]): string {
  if (coords.length === 0) {
    return "";
  }
  const [first, ...rest] = coords;
  return (
    `M ${first[0].toFixed(2)} ${first[1].toFixed(2)} ` +
    rest.map(([x, y]) => `L ${x.toFixed(2)} ${y.toFixed(2)}`).join(" ") +
    " Z"
  );
}

export function biplot(doc: OrdinationDoc, width = 560, height = 460): string {
  const margin = 46;
  const xs = doc.samples.map((s) => s.coords[0]);
  const ys = doc.samples.map((s) => s.coords[1]);
  const [xMin, xMax] = extent(xs);
  const [yMin, yMax] = extent(ys);
  const pad = 0.08;
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;
  const x = linearScale(xMin - pad * xSpan, xMax + pad * xSpan, margin, width - margin);
  const y = linearScale(yMin - pad * ySpan, yMax + pad * ySpan, height - margin, margin);
  const groups = uniqueGroups(doc.samples.map((s) => s.group ?? ""));

  // hulls first so points draw on top; vertex order comes from the service
  const hulls = Object.entries(doc.group_hulls ?? {})
    .map(([group, order]) => {
      const coords = order.map(
        (i) =>
          [x(doc.samples[i].coords[0]), y(doc.samples[i].coords[1])] as [number, number],
      );
      const color = groupColor(groups, group);
      return (
        `<path d="${hullPath(coords)}" fill="${color}" fill-opacity="0.12" ` +
        `stroke="${color}" stroke-opacity="0.6"><title>${escapeXml(group)}</title></path>`
      );
    })
    .join("");

  const points = doc.samples
    .map(
      (s) =>
        `<circle cx="${x(s.coords[0]).toFixed(2)}" cy="${y(s.coords[1]).toFixed(2)}" r="4" ` +
        `fill="${groupColor(groups, s.group ?? "")}" fill-opacity="0.9">` +
        `<title>${escapeXml(s.label)}${s.group ? ` (${escapeXml(s.group)})` : ""}</title></circle>`,
    )
    .join("");

  // variable axes are standard coordinates; scale them to stay in frame
  const varNorm = Math.max(
    1e-12,
    ...doc.variables.map((v) => Math.hypot(v.coords[0], v.coords[1])),
  );
  const arrowSpan = 0.38 * Math.min(width, height);
  const cxPix = x((xMin + xMax) / 2);
  const cyPix = y((yMin + yMax) / 2);
  const arrows = doc.variables
    .map((v) => {
      const dx = (v.coords[0] / varNorm) * arrowSpan;
      const dy = -(v.coords[1] / varNorm) * arrowSpan;
      return (
        `<line x1="${cxPix.toFixed(2)}" y1="${cyPix.toFixed(2)}" ` +
        `x2="${(cxPix + dx).toFixed(2)}" y2="${(cyPix + dy).toFixed(2)}" ` +
        `stroke="#334155" stroke-opacity="0.7"/>` +
        `<text x="${(cxPix + dx * 1.08).toFixed(2)}" y="${(cyPix + dy * 1.08).toFixed(2)}" ` +
        `class="variable">${escapeXml(v.name)}</text>`
      );
    })
    .join("");

  const axisLabels =
    `<text x="${width / 2}" y="${height - 8}" text-anchor="middle" class="axis">` +
    `${doc.dims[0]} (${pct1(doc.dim_percentages[0])}%)</text>` +
    `<text x="14" y="${height / 2}" transform="rotate(-90 14 ${height / 2})" ` +
    `text-anchor="middle" class="axis">${doc.dims[1]} (${pct1(doc.dim_percentages[1])}%)</text>`;

  return (
    `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
    hulls +
    arrows +
    points +
    axisLabels +
    `</svg>`
  );
}
