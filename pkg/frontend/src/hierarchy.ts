import type { HierarchyDoc, TraceStep } from "./types.js";

/** Layered left-to-right layout of the amalgamation hierarchy.
 *
 * Roots sit in the first column, split children one column further right.
 * Leaf rows are assigned top-down in document order and internal nodes are
 * centred over their children, which keeps step numbers readable along the
 * committed-logratio links. Pure function of the documents, so re-rendering
 * after a refetch reproduces the identical diagram.
 */

export interface NodeVM {
  name: string;
  size: number;
  depth: number;
  x: number;
  y: number;
}

export interface SplitEdgeVM {
  parent: string;
  child: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface SlrLinkVM {
  step: number;
  num: string;
  den: string;
  manual: boolean;
  /** per-step increment from the trace, if the trace carries this step */
  additionalPct: number | null;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface HierarchyVM {
  nodes: NodeVM[];
  splitEdges: SplitEdgeVM[];
  slrLinks: SlrLinkVM[];
  width: number;
  height: number;
}

export interface LayoutOptions {
  columnWidth: number;
  rowHeight: number;
  margin: number;
}

const DEFAULTS: LayoutOptions = { columnWidth: 190, rowHeight: 44, margin: 50 };

export function layoutHierarchy(
  doc: HierarchyDoc,
  traceSteps: TraceStep[] = [],
  options: Partial<LayoutOptions> = {},
): HierarchyVM {
  const { columnWidth, rowHeight, margin } = { ...DEFAULTS, ...options };
  const childrenOf = new Map<string, string[]>();
  for (const split of doc.splits) {
    childrenOf.set(split.parent, [...split.children]);
  }
  const isChild = new Set(doc.splits.flatMap((s) => s.children));
  const roots = doc.nodes.map((n) => n.name).filter((n) => !isChild.has(n));
  const sizes = new Map(doc.nodes.map((n) => [n.name, n.parts.length]));

  const depth = new Map<string, number>();
  const ys = new Map<string, number>();
  let nextRow = 0;

  const place = (name: string, level: number): number => {
    depth.set(name, level);
    const children = childrenOf.get(name);
    if (!children || children.length === 0) {
      const y = margin + nextRow * rowHeight;
      nextRow += 1;
      ys.set(name, y);
      return y;
    }
    const childYs = children.map((c) => place(c, level + 1));
    const y = (Math.min(...childYs) + Math.max(...childYs)) / 2;
    ys.set(name, y);
    return y;
  };
  for (const root of roots) {
    place(root, 0);
  }

  const nodes: NodeVM[] = doc.nodes.map((n) => ({
    name: n.name,
    size: sizes.get(n.name) ?? 0,
    depth: depth.get(n.name) ?? 0,
    x: margin + (depth.get(n.name) ?? 0) * columnWidth,
    y: ys.get(n.name) ?? margin,
  }));
  const byName = new Map(nodes.map((n) => [n.name, n]));

  const splitEdges: SplitEdgeVM[] = doc.splits.flatMap((split) => {
    const parent = byName.get(split.parent);
    if (!parent) {
      return [];
    }
    return split.children.flatMap((childName) => {
      const child = byName.get(childName);
      if (!child) {
        return [];
      }
      return [
        {
          parent: split.parent,
          child: childName,
          x1: parent.x,
          y1: parent.y,
          x2: child.x,
          y2: child.y,
        },
      ];
    });
  });

  const incrementByStep = new Map(traceSteps.map((s) => [s.step, s.additional_pct]));
  const slrLinks: SlrLinkVM[] = doc.slrs.flatMap((slr) => {
    const a = byName.get(slr.num);
    const b = byName.get(slr.den);
    if (!a || !b) {
      return [];
    }
    return [
      {
        step: slr.step,
        num: slr.num,
        den: slr.den,
        manual: slr.manual,
        additionalPct: incrementByStep.get(slr.step) ?? null,
        x1: a.x,
        y1: a.y,
        x2: b.x,
        y2: b.y,
      },
    ];
  });

  const maxDepth = Math.max(0, ...nodes.map((n) => n.depth));
  return {
    nodes,
    splitEdges,
    slrLinks,
    width: 2 * margin + (maxDepth + 1) * columnWidth,
    height: 2 * margin + Math.max(0, nextRow - 1) * rowHeight,
  };
}
