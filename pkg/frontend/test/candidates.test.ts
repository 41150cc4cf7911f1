import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  candidatePanel,
  parseSplitDraft,
  siblingPairs,
  validateSplit,
} from "../src/candidates.js";
import { candidateTableHtml, traceTableHtml } from "../src/render.js";
import type { EvaluateResponse, StateDoc } from "../src/types.js";

const evaluation = JSON.parse(
  readFileSync(new URL("./fixtures/evaluate_step2.json", import.meta.url), "utf8"),
) as EvaluateResponse;

const state = JSON.parse(
  readFileSync(new URL("./fixtures/state_full.json", import.meta.url), "utf8"),
) as StateDoc;

describe("candidate panel", () => {
  const rows = candidatePanel(evaluation);

  it("preserves the service's row order verbatim", () => {
    expect(rows.map((r) => r.label)).toEqual(
      evaluation.candidates.map((c) => c.label),
    );
  });

  it("shows the step-2 tie: two candidates with the same increase", () => {
    const tied = rows.filter((r) => r.tied);
    expect(tied.map((r) => r.label).sort()).toEqual(["MUFA/SFA", "PUFA/MUFA"]);
    expect(tied[0].additionalPct).toBeCloseTo(tied[1].additionalPct, 9);
  });

  it("disables commit on an already-committed candidate and scores it +0", () => {
    const committed = rows.find((r) => r.label === "PUFA/SFA");
    expect(committed?.committed).toBe(true);
    expect(committed?.commitEnabled).toBe(false);
    expect(committed?.additionalPct).toBe(0);
  });

  it("flags a non-tied, non-committed candidate as a manual override", () => {
    const synthetic = candidatePanel({
      base_pct: 0,
      tie_set: ["A/B"],
      candidates: [
        { label: "A/B", num_parts: ["a"], den_parts: ["b"], additional_pct: 10, is_tied: true, is_committed: false },
        { label: "A/C", num_parts: ["a"], den_parts: ["c"], additional_pct: 4, is_tied: false, is_committed: false },
      ],
    });
    expect(synthetic[0].isManualOverride).toBe(false);
    expect(synthetic[1].isManualOverride).toBe(true);
  });

  it("renders percentages from the payload values only", () => {
    const html = candidateTableHtml(rows, evaluation.base_pct);
    expect(html).toContain(`title="${evaluation.base_pct}"`);
    for (const c of evaluation.candidates) {
      expect(html).toContain(`title="${c.additional_pct}"`);
      expect(html).toContain(`+${c.additional_pct.toFixed(1)}`);
    }
  });
});

describe("trace table", () => {
  it("highlights the step-2 tie set", () => {
    const html = traceTableHtml(state.trace.steps, state.cumulative_pct);
    const rows = html.split("<tr>");
    const step2 = rows.find((r) => r.startsWith("<td>2</td>"));
    expect(step2).toBeDefined();
    expect(step2).toContain('class="tied"');
    expect(state.trace.steps[1].tie_set).toHaveLength(2);
  });

  it("marks manual commits", () => {
    const html = traceTableHtml(state.trace.steps, state.cumulative_pct);
    expect(html).toContain("n3/n6 *");
  });
});

describe("split drafting", () => {
  it("parses groups from lines", () => {
    const draft = parseSplitDraft("A: x, y\nB: z\n");
    expect(draft.error).toBeNull();
    expect(draft.groups).toEqual([
      { name: "A", parts: ["x", "y"] },
      { name: "B", parts: ["z"] },
    ]);
  });

  it("rejects overlapping groups before any network call", () => {
    const error = validateSplit(
      [
        { name: "A", parts: ["x", "y"] },
        { name: "B", parts: ["y", "z"] },
      ],
      ["x", "y", "z"],
    );
    expect(error).toMatch(/both A and B/);
  });

  it("requires full coverage of the parent's parts", () => {
    const error = validateSplit(
      [
        { name: "A", parts: ["x"] },
        { name: "B", parts: ["y"] },
      ],
      ["x", "y", "z"],
    );
    expect(error).toMatch(/missing: z/);
  });

  it("accepts a valid partition", () => {
    const error = validateSplit(
      [
        { name: "A", parts: ["x"] },
        { name: "B", parts: ["y", "z"] },
      ],
      ["x", "y", "z"],
    );
    expect(error).toBeNull();
  });

  it("offers every sibling pair of a g-way split", () => {
    expect(siblingPairs(["A", "B", "C"])).toEqual([
      { num: "A", den: "B" },
      { num: "A", den: "C" },
      { num: "B", den: "C" },
    ]);
  });
});
