import type { CandidateRowVM } from "./candidates.js";
import { escapeXml, pct1 } from "./format.js";
import type { HierarchyVM } from "./hierarchy.js";
import type { SessionSummary, TraceStep } from "./types.js";

/** HTML/SVG templates over the view models. Every number shown is a value
 * the service reported; formatting is the only transformation applied. */

export function summaryHtml(summary: SessionSummary): string {
  const replaced = Object.entries(summary.replaced_by_part)
    .map(([part, count]) => `${escapeXml(part)}: ${count}`)
    .join(", ");
  return (
    `<dl>` +
    `<dt>samples</dt><dd>${summary.samples}</dd>` +
    `<dt>parts</dt><dd>${summary.parts}</dd>` +
    `<dt>zero cells replaced</dt><dd title="${escapeXml(replaced)}">${summary.replaced_cells}</dd>` +
    `<dt>total logratio variance</dt>` +
    `<dd title="${summary.total_logratio_variance}">${summary.total_logratio_variance.toFixed(6)}</dd>` +
    `</dl>`
  );
}

export function hierarchySvg(vm: HierarchyVM): string {
  const splitEdges = vm.splitEdges
    .map(
      (e) =>
        `<line x1="${e.x1}" y1="${e.y1}" x2="${e.x2}" y2="${e.y2}" class="split-edge"/>`,
    )
    .join("");
  const slrLinks = vm.slrLinks
    .map((link) => {
      const midX = (link.x1 + link.x2) / 2;
      const midY = (link.y1 + link.y2) / 2 - 6;
      const pct =
        link.additionalPct === null
          ? ""
          : ` +${pct1(link.additionalPct)}%${link.manual ? " (manual)" : ""}`;
      return (
        `<line x1="${link.x1}" y1="${link.y1}" x2="${link.x2}" y2="${link.y2}" ` +
        `class="slr-link" data-step="${link.step}"/>` +
        `<text x="${midX}" y="${midY}" text-anchor="middle" class="slr-label" ` +
        `title="${escapeXml(link.num)}/${escapeXml(link.den)}">` +
        `${link.step}${escapeXml(pct)}</text>`
      );
    })
    .join("");
  const nodes = vm.nodes
    .map(
      (n) =>
        `<g transform="translate(${n.x}, ${n.y})" class="node" data-node="${escapeXml(n.name)}">` +
        `<circle r="5"/>` +
        `<text x="9" y="4">${escapeXml(n.name)}<tspan class="size" dy="-6">${n.size}</tspan></text>` +
        `</g>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${vm.width} ${vm.height}" xmlns="http://www.w3.org/2000/svg">` +
    splitEdges +
    slrLinks +
    nodes +
    `</svg>`
  );
}

export function candidateTableHtml(rows: CandidateRowVM[], basePct: number): string {
  const body = rows
    .map((row, i) => {
      const classes = [row.tied ? "tied" : "", row.committed ? "committed" : ""]
        .filter(Boolean)
        .join(" ");
      const button = row.commitEnabled
        ? `<button data-commit="${i}" data-manual="${row.isManualOverride}">commit</button>`
        : `<button disabled>commit</button>`;
      return (
        `<tr class="${classes}">` +
        `<td title="${escapeXml(row.numParts.join("+"))} / ${escapeXml(row.denParts.join("+"))}">` +
        `${escapeXml(row.label)}</td>` +
        `<td class="num" title="${row.additionalPct}">+${pct1(row.additionalPct)}</td>` +
        `<td>${row.tied ? "tie" : ""}${row.committed ? "committed" : ""}</td>` +
        `<td>${button}</td></tr>`
      );
    })
    .join("");
  return (
    `<p>explained so far: <strong title="${basePct}">${pct1(basePct)}%</strong></p>` +
    `<table><thead><tr><th>candidate</th><th>adds</th><th></th><th></th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function traceTableHtml(steps: TraceStep[], cumulativePct: number): string {
  if (steps.length === 0) {
    return `<p>no committed logratios yet</p>`;
  }
  const body = steps
    .map(
      (s) =>
        `<tr><td>${s.step}</td>` +
        `<td>${escapeXml(s.chosen)}${s.manual ? " *" : ""}</td>` +
        `<td class="num" title="${s.additional_pct}">+${pct1(s.additional_pct)}</td>` +
        `<td class="num" title="${s.cumulative_pct}">${pct1(s.cumulative_pct)}</td>` +
        `<td class="${s.tie_set.length > 1 ? "tied" : ""}">${escapeXml(s.tie_set.join(", "))}</td></tr>`,
    )
    .join("");
  return (
    `<table><thead><tr><th>step</th><th>chosen</th><th>adds</th>` +
    `<th>cumulative</th><th>tie set</th></tr></thead><tbody>${body}</tbody></table>` +
    `<p>total explained: <strong title="${cumulativePct}">${pct1(cumulativePct)}%</strong>` +
    ` &nbsp; <span class="hint">* committed manually</span></p>`
  );
}
