/** Payload shapes of the treefreeze HTTP/JSON API, mirrored 1:1. */

export type NodeKind = "operator" | "activity" | "tau";

/** One node of the tree payload's flat preorder node map. */
export interface TreeNodeInfo {
  id: number;
  /** Child-index path from the root; [] for the root itself. */
  path: number[];
  /** Display text: operator glyph, activity label, or τ. */
  text: string;
  kind: NodeKind;
  frozen_root: boolean;
  frozen: boolean;
}

export interface TreePayload {
  /** Canonical textual form — the source of truth for what is shown. */
  text: string;
  dot: string;
  nodes: TreeNodeInfo[];
  frozen_paths: number[][];
}

export interface VariantInfo {
  index: number;
  trace: string[];
  count: number;
  covered: boolean;
}

export interface VariantQuality {
  trace: string[];
  frequency: number;
  cost: number;
  worst_cost: number;
}

export interface QualityRow {
  tree: string;
  fitness: number;
  precision: number;
  f_measure: number;
  variants: VariantQuality[];
}

export interface SessionView {
  id: string;
  tree: TreePayload;
  variants: VariantInfo[];
  previous: string[][];
  metrics: QualityRow[];
  ipda: string;
  available_ipdas: string[];
  algorithms: string[];
}

export interface CreateSessionRequest {
  traces?: string[][];
  log_path?: string;
  tree?: string;
  ipda?: string;
  loop_bound?: number;
  search_budget?: number;
}

export interface IncrementRequest {
  variant?: number;
  trace?: string[];
  algorithm: string;
  ipda?: string;
}

export interface IncrementChecks {
  frozen_preserved: boolean;
  previous_accepted: boolean;
}

export interface IncrementResponse {
  tree: TreePayload;
  report: QualityRow;
  checks: IncrementChecks;
  previous: string[][];
  variants: VariantInfo[];
}

export interface UndoResponse {
  tree: TreePayload;
  previous: string[][];
  variants: VariantInfo[];
}

export interface MetricsResponse {
  rows: QualityRow[];
  csv: string;
}
