import type {
  EvaluateResponse,
  Fourfold,
  GraphEdge,
  GraphModel,
  LogsView,
  MetricsReport,
} from "./types.js";

/** Pure render models. Every number shown to the user is carried through
 * verbatim from the server response; only geometry is computed here. */

export const COLORS = {
  positive: "#1b9e77", // colorblind-safe green
  negative: "#d95f02", // paired red/orange
  undirected: "#e6ab02",
  multiClass: "#8a8a8a",
  neutral: "#bbbbbb",
} as const;

export interface EdgeStyle {
  color: string;
  width: number;
  dashed: boolean;
  hidden: boolean;
  label: string;
}

/** Width encodes |standardized beta| (the alpha-scaled effective value in
 * the debias stage); color encodes its sign. Undirected edges are orange,
 * multi-level categorical targets gray. The weak-edge filter only hides. */
export function edgeStyle(edge: GraphEdge, filterThreshold = 0, showWeights = false): EdgeStyle {
  const weight = edge.effective_weight ?? edge.weight;
  const magnitude = weight === null ? 0 : Math.abs(weight);
  let color: string = COLORS.multiClass;
  if (!edge.directed) color = COLORS.undirected;
  else if (edge.multi_class) color = COLORS.multiClass;
  else if (weight !== null) color = weight >= 0 ? COLORS.positive : COLORS.negative;
  const baseWeight = edge.weight === null ? 0 : Math.abs(edge.weight);
  return {
    color,
    width: edge.directed ? Math.min(1 + 7 * magnitude, 8) : 1.5,
    dashed: edge.deleted_in_debias,
    hidden: edge.directed && !edge.multi_class && baseWeight < filterThreshold,
    label: showWeights && weight !== null ? weight.toFixed(3) : "",
  };
}

export interface BicBarModel {
  delta: number;
  color: string;
  fraction: number; // bar extent in [0, 1]
  text: string;
}

/** Negative deltas (better fit) render green, positive red. */
export function bicBar(delta: number, scale = 200): BicBarModel {
  return {
    delta,
    color: delta <= 0 ? COLORS.positive : COLORS.negative,
    fraction: Math.min(Math.abs(delta) / scale, 1),
    text: delta.toFixed(2),
  };
}

export interface QuadrantModel {
  key: "a_favorable" | "a_unfavorable" | "b_favorable" | "b_unfavorable";
  percent: number;
  count: number;
  radius: number; // in [0, 1], proportional to sqrt share of the group
  startAngle: number;
}

export interface FourfoldModel {
  quadrants: QuadrantModel[];
  groupSizes: { a: number; b: number };
}

/** Quarter-circle sectors: left half group A, right half group B, top the
 * favorable outcome. Symmetry across the vertical axis reads as fairness. */
export function fourfoldModel(ff: Fourfold): FourfoldModel {
  const keys: QuadrantModel["key"][] = [
    "a_favorable",
    "b_favorable",
    "b_unfavorable",
    "a_unfavorable",
  ];
  const angles = [180, 270, 0, 90];
  return {
    quadrants: keys.map((key, i) => ({
      key,
      percent: ff.percent[key],
      count: ff.counts[key],
      radius: Math.sqrt(Math.max(ff.percent[key], 0) / 100),
      startAngle: angles[i],
    })),
    groupSizes: ff.group_sizes,
  };
}

export interface MetricBarRow {
  metric: string;
  kind: "fairness" | "utility";
  original: number;
  debiased: number;
  max: number;
}

const FAIRNESS_ROWS: [keyof MetricsReport, string][] = [
  ["parity_diff", "Parity diff"],
  ["individual_bias", "Ind. bias"],
  ["accuracy_diff", "Accuracy diff"],
  ["fnr_diff", "FNR diff"],
  ["fpr_diff", "FPR diff"],
];

const UTILITY_ROWS: [keyof MetricsReport, string][] = [
  ["accuracy", "Accuracy"],
  ["f1", "F1"],
];

/** Grouped horizontal bars: original (baseline strategy) vs debiased,
 * fairness lower-is-better, utility higher-is-better. */
export function metricBars(report: EvaluateResponse): MetricBarRow[] {
  const rows: MetricBarRow[] = [];
  for (const [key, label] of FAIRNESS_ROWS) {
    const original = report.original[key] as number;
    const debiased = report.debiased[key] as number;
    rows.push({
      metric: label,
      kind: "fairness",
      original,
      debiased,
      max: Math.max(original, debiased, 1e-9),
    });
  }
  for (const [key, label] of UTILITY_ROWS) {
    const original = report.original[key] as number;
    const debiased = report.debiased[key] as number;
    rows.push({ metric: label, kind: "utility", original, debiased, max: 1 });
  }
  return rows;
}

export interface DonutModel {
  distortion: number;
  sweepDegrees: number;
  text: string;
}

export function distortionDonut(distortion: number): DonutModel {
  return {
    distortion,
    sweepDegrees: Math.max(0, Math.min(1, distortion)) * 360,
    text: `${(distortion * 100).toFixed(1)}%`,
  };
}

export interface LogsOverlayModel {
  visibleEdges: { src: string; dst: string; kind: "added" | "deleted" | "weakened" | "strengthened" }[];
  impactedNodes: string[];
}

/** Logs view: hide everything except debias-stage changes; gray impacted
 * nodes. */
export function logsOverlay(logs: LogsView): LogsOverlayModel {
  const visibleEdges: LogsOverlayModel["visibleEdges"] = [];
  for (const e of logs.added) visibleEdges.push({ ...e, kind: "added" });
  for (const m of logs.modified) {
    visibleEdges.push({ src: m.src, dst: m.dst, kind: m.kind as "deleted" | "weakened" | "strengthened" });
  }
  return { visibleEdges, impactedNodes: [...logs.affected_nodes] };
}

/** Edges on one directed path, for highlight animation. */
export function pathEdgeSet(path: string[]): Set<string> {
  const out = new Set<string>();
  for (let i = 0; i + 1 < path.length; i++) out.add(`${path[i]}->${path[i + 1]}`);
  return out;
}

export function edgeKey(e: GraphEdge): string {
  return `${e.src}->${e.dst}`;
}

/** Binary categorical columns qualify for the sensitive-variable dropdown. */
export function sensitiveCandidates(
  columns: { name: string; kind: string; levels?: string[] }[],
  label: string,
): string[] {
  return columns
    .filter((c) => c.name !== label && c.kind !== "numeric" && (c.levels?.length ?? 0) === 2)
    .map((c) => c.name);
}

/** Sliders map -100..100 percent onto the edge scale factor in [0, 2]. */
export function weightPercentToAlpha(percent: number): number {
  return 1 + percent / 100;
}

export function stageBadge(model: GraphModel): { stage: string; editsEnabled: boolean } {
  return { stage: model.stage, editsEnabled: true };
}
