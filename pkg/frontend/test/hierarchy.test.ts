import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { layoutHierarchy } from "../src/hierarchy.js";
import type { ExportDoc } from "../src/types.js";

const exported = JSON.parse(
  readFileSync(new URL("./fixtures/session_export.json", import.meta.url), "utf8"),
) as ExportDoc;

describe("hierarchy layout", () => {
  const vm = layoutHierarchy(exported.hierarchy, exported.trace.steps);

  it("renders one diagram node per hierarchy node (12 for the case study)", () => {
    expect(vm.nodes).toHaveLength(12);
    const names = vm.nodes.map((n) => n.name);
    expect(names).toContain("SFA");
    expect(names).toContain("MUFAshort");
  });

  it("renders exactly one link per committed logratio (7 for the case study)", () => {
    expect(vm.slrLinks).toHaveLength(7);
    expect(vm.slrLinks).toHaveLength(exported.hierarchy.slrs.length);
  });

  it("annotates links with step numbers and service-reported increments", () => {
    const steps = vm.slrLinks.map((l) => l.step).sort((a, b) => a - b);
    expect(steps).toEqual([1, 2, 3, 4, 5, 6, 7]);
    for (const link of vm.slrLinks) {
      const traced = exported.trace.steps.find((s) => s.step === link.step);
      expect(link.additionalPct).toBe(traced?.additional_pct ?? null);
    }
  });

  it("marks the manual commits", () => {
    const manualSteps = vm.slrLinks.filter((l) => l.manual).map((l) => l.step);
    expect(manualSteps).toEqual(
      exported.hierarchy.slrs.filter((s) => s.manual).map((s) => s.step),
    );
  });

  it("labels nodes with their part counts", () => {
    const bySize = new Map(vm.nodes.map((n) => [n.name, n.size]));
    expect(bySize.get("SFA")).toBe(11);
    expect(bySize.get("PUFA")).toBe(15);
    expect(bySize.get("nX")).toBe(3);
  });

  it("places roots in the first column and children to the right", () => {
    const byName = new Map(vm.nodes.map((n) => [n.name, n]));
    for (const root of ["SFA", "MUFA", "PUFA"]) {
      expect(byName.get(root)?.depth).toBe(0);
    }
    expect(byName.get("n3")!.depth).toBe(1);
    expect(byName.get("n3")!.x).toBeGreaterThan(byName.get("PUFA")!.x);
  });

  it("draws one split edge per parent-child relation", () => {
    expect(vm.splitEdges).toHaveLength(3 + 2 + 4);
  });

  it("is a pure function of the documents (refetch reproduces the screen)", () => {
    const again = layoutHierarchy(exported.hierarchy, exported.trace.steps);
    expect(again).toEqual(vm);
  });

  it("handles a fresh session: roots only, no links", () => {
    const fresh = layoutHierarchy(
      {
        nodes: [
          { name: "A", parts: ["x"] },
          { name: "B", parts: ["y", "z"] },
        ],
        splits: [],
        slrs: [],
      },
      [],
    );
    expect(fresh.nodes).toHaveLength(2);
    expect(fresh.slrLinks).toHaveLength(0);
    expect(fresh.splitEdges).toHaveLength(0);
    expect(fresh.nodes.every((n) => n.depth === 0)).toBe(true);
  });
});
