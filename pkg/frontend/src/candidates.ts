import type { EvaluateResponse } from "./types.js";

/** View model of the what-if candidate table.
 *
 * The service body is authoritative: row order is preserved verbatim (no
 * client re-sorting), percentages are rendered from the payload values, and
 * a committed candidate cannot be committed again. Committing any row that
 * is not in the tie set is a manual override and must be confirmed.
 */

export interface CandidateRowVM {
  label: string;
  numParts: string[];
  denParts: string[];
  additionalPct: number;
  tied: boolean;
  committed: boolean;
  commitEnabled: boolean;
  isManualOverride: boolean;
}

export function candidatePanel(response: EvaluateResponse): CandidateRowVM[] {
  return response.candidates.map((c) => ({
    label: c.label,
    numParts: c.num_parts,
    denParts: c.den_parts,
    additionalPct: c.additional_pct,
    tied: c.is_tied,
    committed: c.is_committed,
    commitEnabled: !c.is_committed,
    isManualOverride: !c.is_tied && !c.is_committed,
  }));
}

export interface SplitDraftGroup {
  name: string;
  parts: string[];
}

export interface SplitDraft {
  groups: SplitDraftGroup[];
  error: string | null;
}

/** Parse a split drafted as one group per line, `name: part, part, ...`. */
export function parseSplitDraft(text: string): SplitDraft {
  const groups: SplitDraftGroup[] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (!line) {
      continue;
    }
    const colon = line.indexOf(":");
    if (colon <= 0) {
      return { groups: [], error: `expected "name: part, part" but got "${line}"` };
    }
    const name = line.slice(0, colon).trim();
    const parts = line
      .slice(colon + 1)
      .split(",")
      .map((p) => p.trim())
      .filter((p) => p.length > 0);
    groups.push({ name, parts });
  }
  return { groups, error: null };
}

/** Inline validation run before any network call. */
export function validateSplit(
  groups: SplitDraftGroup[],
  availableParts: string[],
): string | null {
  if (groups.length < 2) {
    return "a split needs at least 2 groups";
  }
  const names = new Set<string>();
  const seenParts = new Map<string, string>();
  const available = new Set(availableParts);
  for (const group of groups) {
    if (!group.name) {
      return "every group needs a name";
    }
    if (names.has(group.name)) {
      return `duplicate group name: ${group.name}`;
    }
    names.add(group.name);
    if (group.parts.length === 0) {
      return `group ${group.name} has no parts`;
    }
    for (const part of group.parts) {
      if (!available.has(part)) {
        return `unknown part in ${group.name}: ${part}`;
      }
      const owner = seenParts.get(part);
      if (owner !== undefined) {
        return `part ${part} is in both ${owner} and ${group.name}`;
      }
      seenParts.set(part, group.name);
    }
  }
  const uncovered = availableParts.filter((p) => !seenParts.has(p));
  if (uncovered.length > 0) {
    return `groups must cover every part; missing: ${uncovered.join(", ")}`;
  }
  return null;
}

/** All unordered sibling pairs, the candidate logratios of a g-way split. */
export function siblingPairs(names: string[]): { num: string; den: string }[] {
  const pairs: { num: string; den: string }[] = [];
  for (let a = 0; a < names.length; a++) {
    for (let b = a + 1; b < names.length; b++) {
      pairs.push({ num: names[a], den: names[b] });
    }
  }
  return pairs;
}
