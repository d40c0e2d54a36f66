import type { GraphEdge, GraphNode } from "./types.js";

export interface NodePosition {
  name: string;
  x: number;
  y: number;
  layer: number;
}

/** Layered left-to-right DAG layout so edge direction reads naturally.
 *
 * Layers come from longest-path depth over the directed edges (undirected
 * edges do not constrain layering). Within-layer order is settled by a few
 * barycenter sweeps to reduce crossings; everything is deterministic.
 */
export function layeredLayout(
  nodes: GraphNode[],
  edges: GraphEdge[],
  width = 900,
  height = 560,
  margin = 70,
): NodePosition[] {
  const names = nodes.map((n) => n.name);
  const directed = edges.filter((e) => e.directed);
  const parents = new Map<string, string[]>(names.map((n) => [n, []]));
  for (const e of directed) {
    parents.get(e.dst)?.push(e.src);
  }

  const layer = new Map<string, number>();
  const depth = (name: string, seen: Set<string>): number => {
    const cached = layer.get(name);
    if (cached !== undefined) return cached;
    if (seen.has(name)) return 0; // cycle guard; the service keeps DAGs acyclic
    seen.add(name);
    const ps = parents.get(name) ?? [];
    const d = ps.length === 0 ? 0 : 1 + Math.max(...ps.map((p) => depth(p, seen)));
    seen.delete(name);
    layer.set(name, d);
    return d;
  };
  for (const n of names) depth(n, new Set());

  const maxLayer = Math.max(0, ...layer.values());
  const perLayer = new Map<number, string[]>();
  for (const n of [...names].sort()) {
    const l = layer.get(n) ?? 0;
    if (!perLayer.has(l)) perLayer.set(l, []);
    perLayer.get(l)!.push(n);
  }

  // barycenter ordering: average the neighbor indices from the previous layer
  const neighborIndex = new Map<string, number>();
  const undirectedPairs = edges
    .filter((e) => !e.directed)
    .map((e) => [e.src, e.dst] as const);
  for (let pass = 0; pass < 3; pass++) {
    for (let l = 0; l <= maxLayer; l++) {
      const current = perLayer.get(l);
      if (!current) continue;
      current.forEach((n, i) => neighborIndex.set(n, i));
      const score = (n: string): number => {
        const anchors: number[] = [];
        for (const e of directed) {
          if (e.dst === n && neighborIndex.has(e.src)) anchors.push(neighborIndex.get(e.src)!);
          if (e.src === n && neighborIndex.has(e.dst)) anchors.push(neighborIndex.get(e.dst)!);
        }
        for (const [a, b] of undirectedPairs) {
          if (a === n && neighborIndex.has(b)) anchors.push(neighborIndex.get(b)!);
          if (b === n && neighborIndex.has(a)) anchors.push(neighborIndex.get(a)!);
        }
        if (anchors.length === 0) return neighborIndex.get(n) ?? 0;
        return anchors.reduce((s, v) => s + v, 0) / anchors.length;
      };
      const ranked = current
        .map((n) => ({ n, s: score(n) }))
        .sort((a, b) => a.s - b.s || (a.n < b.n ? -1 : 1))
        .map((r) => r.n);
      perLayer.set(l, ranked);
      ranked.forEach((n, i) => neighborIndex.set(n, i));
    }
  }

  const xStep = maxLayer === 0 ? 0 : (width - 2 * margin) / maxLayer;
  const out: NodePosition[] = [];
  for (let l = 0; l <= maxLayer; l++) {
    const column = perLayer.get(l) ?? [];
    const yStep = column.length <= 1 ? 0 : (height - 2 * margin) / (column.length - 1);
    column.forEach((n, i) => {
      out.push({
        name: n,
        layer: l,
        x: margin + l * xStep,
        y: column.length === 1 ? height / 2 : margin + i * yStep,
      });
    });
  }
  return out.sort((a, b) => (a.name < b.name ? -1 : 1));
}
