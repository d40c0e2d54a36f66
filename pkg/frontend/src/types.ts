/** Shapes of the service's JSON responses. Field names mirror the wire
 * format exactly; the UI never recomputes server numbers. */

export type Stage = "refine" | "debias";

export interface GraphNode {
  name: string;
  kind?: "numeric" | "ordinal" | "nominal";
  is_label?: boolean;
}

export interface GraphEdge {
  src: string;
  dst: string;
  directed: boolean;
  alpha: number | null;
  weight: number | null;
  effective_weight: number | null;
  multi_class: boolean;
  added_in_debias: boolean;
  deleted_in_debias: boolean;
}

export interface GraphModel {
  nodes: GraphNode[];
  edges: GraphEdge[];
  fits: Record<string, unknown>;
  total_bic: number;
  stage: Stage;
}

export interface DatasetInfo {
  dataset_id: string;
  n_rows: number;
  n_dropped_rows: number;
  columns: { name: string; kind: string; levels?: string[]; range?: [number, number] | null }[];
  label: string;
}

export interface SessionInfo {
  session_id: string;
  pdag: { nodes: string[]; edges: { src: string; dst: string; directed: boolean }[] };
  model: GraphModel;
}

export interface EditRequest {
  op: "add" | "delete" | "reverse" | "direct" | "reweight";
  src: string;
  dst: string;
  weight_percent?: number;
}

export interface EditResponse {
  bic_delta: number;
  model: GraphModel;
}

export interface Fourfold {
  counts: Record<string, number>;
  percent: Record<string, number>;
  group_sizes: { a: number; b: number };
}

export interface MetricsReport {
  parity_diff: number;
  individual_bias: number;
  accuracy_diff: number;
  fnr_diff: number;
  fpr_diff: number;
  accuracy: number;
  f1: number;
  distortion: number;
  fourfold: Fourfold;
  warnings: string[];
}

export interface EvaluateResponse {
  original: MetricsReport;
  debiased: MetricsReport;
  group_overlap_warning: boolean;
}

export interface GroupSpecJson {
  column?: string;
  privileged_level?: string;
  group_a?: SelectionJson[];
  group_b?: SelectionJson[];
}

export interface SelectionJson {
  column: string;
  levels?: string[];
  bin?: [number, number];
}

export interface PathsResponse {
  source: string;
  target: string;
  paths: string[][];
}

export interface DebiasResponse {
  run_id: string;
  seed: number;
  affected_nodes: string[];
}

export interface LogsView {
  entries: { op: string; src?: string; dst?: string; weight_percent?: number; stage: Stage }[];
  added: { src: string; dst: string }[];
  modified: { src: string; dst: string; alpha: number; kind: string }[];
  affected_nodes: string[];
  stage: Stage;
  last_debias?: { seed: number; affected_nodes: string[]; edit_log_hash: string };
}

export interface DistributionSummary {
  kind: "node" | "edge";
  name?: string;
  original: Record<string, unknown> & { type: string };
  debiased: Record<string, unknown> & { type: string };
  debiased_available: boolean;
}
