import assert from "node:assert/strict";
import { test } from "node:test";

import type { Fourfold, GraphEdge, LogsView } from "../src/types.js";
import {
  COLORS,
  bicBar,
  distortionDonut,
  edgeStyle,
  fourfoldModel,
  logsOverlay,
  metricBars,
  pathEdgeSet,
  sensitiveCandidates,
  weightPercentToAlpha,
} from "../src/viewmodel.js";

function edge(partial: Partial<GraphEdge>): GraphEdge {
  return {
    src: "a", dst: "b", directed: true, alpha: 1, weight: 0.4,
    effective_weight: 0.4, multi_class: false,
    added_in_debias: false, deleted_in_debias: false,
    ...partial,
  };
}

test("edge colors: sign green/red, undirected orange, multi-class gray", () => {
  assert.equal(edgeStyle(edge({ weight: 0.5, effective_weight: 0.5 })).color, COLORS.positive);
  assert.equal(edgeStyle(edge({ weight: -0.5, effective_weight: -0.5 })).color, COLORS.negative);
  assert.equal(edgeStyle(edge({ directed: false, weight: null, effective_weight: null, alpha: null })).color, COLORS.undirected);
  assert.equal(edgeStyle(edge({ multi_class: true })).color, COLORS.multiClass);
});

test("edge width grows with the effective coefficient and deletion dashes", () => {
  const thin = edgeStyle(edge({ weight: 0.05, effective_weight: 0.05 }));
  const thick = edgeStyle(edge({ weight: 0.9, effective_weight: 0.9 }));
  assert.ok(thick.width > thin.width);
  // debias reweight to alpha=0.5 halves the rendered magnitude
  const halved = edgeStyle(edge({ weight: 0.9, effective_weight: 0.45, alpha: 0.5 }));
  assert.ok(halved.width < thick.width);
  assert.equal(edgeStyle(edge({ deleted_in_debias: true, effective_weight: 0 })).dashed, true);
});

test("weak-edge filter hides by |standardized beta| without deleting", () => {
  const hidden = edgeStyle(edge({ weight: 0.1, effective_weight: 0.1 }), 0.2);
  const kept = edgeStyle(edge({ weight: 0.3, effective_weight: 0.3 }), 0.2);
  assert.equal(hidden.hidden, true);
  assert.equal(kept.hidden, false);
  // undirected edges have no beta and never disappear through the filter
  assert.equal(edgeStyle(edge({ directed: false, weight: null, effective_weight: null }), 0.9).hidden, false);
});

test("weight labels render only when asked", () => {
  assert.equal(edgeStyle(edge({}), 0, false).label, "");
  assert.equal(edgeStyle(edge({ effective_weight: 0.456 }), 0, true).label, "0.456");
});

test("bic bar is green for negative deltas, red for positive", () => {
  assert.equal(bicBar(-12.5).color, COLORS.positive);
  assert.equal(bicBar(31.0).color, COLORS.negative);
  assert.equal(bicBar(-12.5).text, "-12.50");
  assert.ok(bicBar(-1e9).fraction <= 1);
});

test("fourfold keeps server percentages verbatim and scales radii by sqrt", () => {
  const ff: Fourfold = {
    counts: { a_favorable: 26, a_unfavorable: 74, b_favorable: 15, b_unfavorable: 85 },
    percent: { a_favorable: 26.0, a_unfavorable: 74.0, b_favorable: 15.0, b_unfavorable: 85.0 },
    group_sizes: { a: 100, b: 100 },
  };
  const model = fourfoldModel(ff);
  const byKey = Object.fromEntries(model.quadrants.map((q) => [q.key, q]));
  assert.equal(byKey.a_favorable.percent, 26.0);
  assert.equal(byKey.b_favorable.percent, 15.0);
  assert.equal(byKey.a_favorable.count, 26);
  assert.ok(Math.abs(byKey.a_favorable.radius - Math.sqrt(0.26)) < 1e-12);
  assert.equal(model.groupSizes.a, 100);
});

test("metric bars carry both reports verbatim", () => {
  const report = {
    original: { parity_diff: 10.5, individual_bias: 20.25, accuracy_diff: 4.125,
      fnr_diff: 8.5, fpr_diff: 2.75, accuracy: 0.845, f1: 0.565, distortion: 0,
      fourfold: {} as Fourfold, warnings: [] },
    debiased: { parity_diff: 1.25, individual_bias: 18.0, accuracy_diff: 1.0,
      fnr_diff: 3.5, fpr_diff: 0.75, accuracy: 0.82, f1: 0.55, distortion: 0.055,
      fourfold: {} as Fourfold, warnings: [] },
    group_overlap_warning: false,
  };
  const rows = metricBars(report);
  const parity = rows.find((r) => r.metric === "Parity diff")!;
  assert.equal(parity.original, 10.5);
  assert.equal(parity.debiased, 1.25);
  assert.equal(parity.kind, "fairness");
  const acc = rows.find((r) => r.metric === "Accuracy")!;
  assert.equal(acc.original, 0.845);
  assert.equal(acc.kind, "utility");
  assert.equal(rows.length, 7);
});

test("donut sweep is proportional to distortion", () => {
  assert.equal(distortionDonut(0.25).sweepDegrees, 90);
  assert.equal(distortionDonut(0.055).text, "5.5%");
  assert.equal(distortionDonut(2.0).sweepDegrees, 360);
});

test("logs overlay shows only debias-touched edges and affected nodes", () => {
  const logs: LogsView = {
    entries: [],
    added: [{ src: "a", dst: "b" }],
    modified: [
      { src: "g", dst: "j", alpha: 0, kind: "deleted" },
      { src: "g", dst: "m", alpha: 0.4, kind: "weakened" },
    ],
    affected_nodes: ["b", "j", "m"],
    stage: "debias",
  };
  const overlay = logsOverlay(logs);
  assert.equal(overlay.visibleEdges.length, 3);
  assert.deepEqual(overlay.visibleEdges[0], { src: "a", dst: "b", kind: "added" });
  assert.deepEqual(overlay.impactedNodes, ["b", "j", "m"]);
});

test("path edge sets and alpha slider mapping", () => {
  assert.deepEqual([...pathEdgeSet(["s", "m", "y"])], ["s->m", "m->y"]);
  assert.equal(weightPercentToAlpha(-100), 0);
  assert.equal(weightPercentToAlpha(0), 1);
  assert.equal(weightPercentToAlpha(100), 2);
});

test("sensitive dropdown lists binary categorical columns, label excluded", () => {
  const cols = [
    { name: "gender", kind: "nominal", levels: ["f", "m"] },
    { name: "race", kind: "nominal", levels: ["a", "b", "c"] },
    { name: "age", kind: "numeric" },
    { name: "job", kind: "nominal", levels: ["n", "y"] },
  ];
  assert.deepEqual(sensitiveCandidates(cols, "job"), ["gender"]);
});
