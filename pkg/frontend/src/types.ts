/** Shapes of the service's JSON documents. The workbench renders these
 * verbatim; it never recomputes a statistic client-side. */

export interface SessionSummary {
  id: string;
  samples: number;
  parts: number;
  part_names: string[];
  group_levels: string[];
  replaced_cells: number;
  replaced_by_part: Record<string, number>;
  total_logratio_variance: number;
}

export interface HierarchyNode {
  name: string;
  parts: string[];
}

export interface HierarchySplit {
  parent: string;
  children: string[];
}

export interface HierarchySlr {
  step: number;
  num: string;
  den: string;
  manual: boolean;
}

export interface HierarchyDoc {
  nodes: HierarchyNode[];
  splits: HierarchySplit[];
  slrs: HierarchySlr[];
}

export interface TraceCandidate {
  label: string;
  additional_pct: number;
}

export interface TraceStep {
  step: number;
  chosen: string;
  additional_pct: number;
  cumulative_pct: number;
  tie_set: string[];
  manual: boolean;
  candidates: TraceCandidate[];
}

export interface Trace {
  steps: TraceStep[];
  cumulative_pct: number;
}

export interface StateDoc {
  id: string;
  hierarchy: HierarchyDoc;
  trace: Trace;
  cumulative_pct: number;
  can_undo: boolean;
  can_redo: boolean;
}

export interface SlrDefinition {
  step: number;
  label: string;
  numerator: { node: string; parts: string[] };
  denominator: { node: string; parts: string[] };
  manual: boolean;
}

export interface ExportDoc extends StateDoc {
  slr_definitions: SlrDefinition[];
  total_logratio_variance: number;
}

export interface EvaluateCandidate {
  label: string;
  num_parts: string[];
  den_parts: string[];
  additional_pct: number;
  is_tied: boolean;
  is_committed: boolean;
}

export interface EvaluateResponse {
  base_pct: number;
  tie_set: string[];
  candidates: EvaluateCandidate[];
}

export interface OrdinationSample {
  label: string;
  group: string | null;
  coords: number[];
}

export interface OrdinationVariable {
  name: string;
  coords: number[];
}

export interface OrdinationDoc {
  dims: string[];
  dim_variances: number[];
  dim_percentages: number[];
  samples: OrdinationSample[];
  variables: OrdinationVariable[];
  group_hulls?: Record<string, number[]>;
}

export interface TernaryPoint {
  label: string;
  group: string | null;
  x: number;
  y: number;
}

export interface TernaryDoc {
  vertices: string[];
  points: TernaryPoint[];
}

export interface AmalgamatedDoc {
  parts: string[];
  labels: string[];
  groups: string[] | null;
  rows: number[][];
}

export type OrdinationMode = "lra" | "pca-slr" | "ternary";
