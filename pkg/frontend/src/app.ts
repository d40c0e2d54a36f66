import { ApiClient } from "./api.js";
import { layeredLayout, type NodePosition } from "./layout.js";
import { SessionState } from "./session.js";
import type {
  DistributionSummary,
  EvaluateResponse,
  GraphEdge,
  GroupSpecJson,
  SelectionJson,
  Stage,
} from "./types.js";
import {
  COLORS,
  bicBar,
  distortionDonut,
  edgeKey,
  edgeStyle,
  fourfoldModel,
  logsOverlay,
  metricBars,
  pathEdgeSet,
  sensitiveCandidates,
} from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

interface ViewPrefs {
  filterThreshold: number;
  showWeights: boolean;
  logsMode: boolean;
  zoom: number;
  panX: number;
  panY: number;
}

class App {
  private state: SessionState;
  private positions = new Map<string, NodePosition>();
  private prefs: ViewPrefs = { filterThreshold: 0, showWeights: false, logsMode: false, zoom: 1, panX: 0, panY: 0 };
  private selectedEdge: GraphEdge | null = null;
  private selectedNode: string | null = null;
  private highlightedPath = new Set<string>();
  private busy = false;

  constructor(client: ApiClient) {
    this.state = new SessionState(client);
  }

  // ----- boot ---------------------------------------------------------

  async init() {
    byId<HTMLButtonElement>("btn-causal-model").onclick = () => this.startSession();
    byId<HTMLButtonElement>("btn-add").onclick = () => this.editFromTopPanel("add");
    byId<HTMLButtonElement>("btn-delete").onclick = () => this.editFromTopPanel("delete");
    byId<HTMLButtonElement>("btn-reverse").onclick = () => this.editFromTopPanel("reverse");
    byId<HTMLButtonElement>("btn-direct").onclick = () => this.editFromTopPanel("direct");
    byId<HTMLInputElement>("stage-toggle").onchange = (ev) =>
      this.toggleStage((ev.target as HTMLInputElement).checked ? "debias" : "refine");
    byId<HTMLButtonElement>("btn-find-paths").onclick = () => this.findPaths();
    byId<HTMLButtonElement>("btn-logs").onclick = () => this.toggleLogs();
    byId<HTMLButtonElement>("btn-evaluate").onclick = () => this.evaluate();
    byId<HTMLButtonElement>("btn-zoom-in").onclick = () => this.zoomBy(1.2);
    byId<HTMLButtonElement>("btn-zoom-out").onclick = () => this.zoomBy(1 / 1.2);
    byId<HTMLButtonElement>("btn-reset-layout").onclick = () => this.resetLayout();
    byId<HTMLInputElement>("weight-slider").onchange = (ev) =>
      this.reweightSelected(parseInt((ev.target as HTMLInputElement).value, 10));
    byId<HTMLInputElement>("filter-slider").oninput = (ev) => {
      this.prefs.filterThreshold = parseFloat((ev.target as HTMLInputElement).value);
      byId("filter-value").textContent = this.prefs.filterThreshold.toFixed(2);
      this.renderGraph();
    };
    byId<HTMLInputElement>("show-weights").onchange = (ev) => {
      this.prefs.showWeights = (ev.target as HTMLInputElement).checked;
      this.renderGraph();
    };
    byId<HTMLSelectElement>("sensitive-select").onchange = () => this.onSensitiveChange();
    byId<HTMLButtonElement>("btn-close-modal").onclick = () =>
      byId("custom-group-modal").classList.add("hidden");
    byId<HTMLButtonElement>("btn-apply-groups").onclick = () =>
      byId("custom-group-modal").classList.add("hidden");

    const svg = byId<HTMLElement>("network");
    svg.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      this.zoomBy((ev as WheelEvent).deltaY < 0 ? 1.1 : 1 / 1.1);
    });

    const sid = window.location.hash.replace(/^#/, "");
    if (sid) {
      try {
        await this.state.resume(sid);
        this.afterModelChange();
        this.toast(`resumed session ${sid.slice(0, 8)}…`, false);
      } catch {
        window.location.hash = "";
      }
    }
  }

  private toast(message: string, isError = true) {
    const box = byId("toast");
    box.textContent = message;
    box.className = isError ? "toast error" : "toast info";
    box.classList.remove("hidden");
    window.setTimeout(() => box.classList.add("hidden"), 4500);
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | undefined> {
    // one in-flight mutation at a time; further edits disabled until ack
    if (this.busy) {
      this.toast("previous request still in flight");
      return undefined;
    }
    this.busy = true;
    document.body.classList.add("busy");
    try {
      return await work();
    } catch (err) {
      this.toast(err instanceof Error ? err.message : String(err));
      return undefined;
    } finally {
      this.busy = false;
      document.body.classList.remove("busy");
    }
  }

  // ----- session ------------------------------------------------------

  private async startSession() {
    const fileInput = byId<HTMLInputElement>("csv-file");
    const file = fileInput.files?.[0];
    if (!file) {
      this.toast("choose a CSV file first");
      return;
    }
    const label = byId<HTMLInputElement>("label-input").value.trim();
    const nominal = byId<HTMLInputElement>("nominal-input").value.split(",").map((s) => s.trim()).filter(Boolean);
    const ordinal = byId<HTMLInputElement>("ordinal-input").value.split(",").map((s) => s.trim()).filter(Boolean);
    const p = parseFloat(byId<HTMLInputElement>("p-input").value || "0.01");
    const text = await file.text();
    await this.guard(async () => {
      await this.state.start(text, label, nominal, ordinal, p);
      window.location.hash = this.state.sessionId ?? "";
      this.afterModelChange(true);
      this.populateSensitiveDropdown();
      const dl = byId<HTMLAnchorElement>("btn-download");
      dl.href = this.state.downloadUrl();
      dl.classList.remove("hidden");
    });
  }

  private afterModelChange(relayout = false) {
    const model = this.state.model;
    if (!model) return;
    if (relayout || this.positions.size === 0) this.resetLayout(false);
    this.populateNodeSelects();
    byId<HTMLInputElement>("stage-toggle").checked = model.stage === "debias";
    byId("stage-label").textContent = model.stage;
    byId("total-bic").textContent = `total BIC ${model.total_bic.toFixed(2)}`;
    this.renderBicBar();
    this.renderGraph();
  }

  private resetLayout(render = true) {
    const model = this.state.model;
    if (!model) return;
    this.positions = new Map(
      layeredLayout(model.nodes, model.edges).map((p) => [p.name, p]),
    );
    this.prefs.zoom = 1;
    this.prefs.panX = 0;
    this.prefs.panY = 0;
    if (render) this.renderGraph();
  }

  private populateNodeSelects() {
    const model = this.state.model;
    if (!model) return;
    for (const id of ["src-select", "dst-select", "path-source", "path-target"]) {
      const select = byId<HTMLSelectElement>(id);
      const current = select.value;
      select.innerHTML = "";
      for (const n of model.nodes) {
        select.appendChild(el("option", { value: n.name }, n.name));
      }
      if (current) select.value = current;
    }
  }

  private populateSensitiveDropdown() {
    const info = this.state.dataset;
    if (!info) return;
    const select = byId<HTMLSelectElement>("sensitive-select");
    select.innerHTML = "";
    for (const name of sensitiveCandidates(info.columns, info.label)) {
      select.appendChild(el("option", { value: name }, name));
    }
    select.appendChild(el("option", { value: "__custom__" }, "Custom Group"));
    const fav = byId<HTMLSelectElement>("favorable-select");
    fav.innerHTML = "";
    const labelCol = info.columns.find((c) => c.name === info.label);
    for (const level of labelCol?.levels ?? []) {
      fav.appendChild(el("option", { value: level }, level));
    }
    if (labelCol?.levels && labelCol.levels.length > 1) fav.value = labelCol.levels[1];
  }

  // ----- graph rendering ----------------------------------------------

  private renderGraph() {
    const model = this.state.model;
    if (!model) return;
    const svg = byId<HTMLElement>("network");
    svg.innerHTML = "";
    const defs = svgEl("defs");
    for (const [id, color] of [
      ["arrow-pos", COLORS.positive],
      ["arrow-neg", COLORS.negative],
      ["arrow-gray", COLORS.multiClass],
    ] as const) {
      const marker = svgEl("marker", {
        id, viewBox: "0 0 10 10", refX: "22", refY: "5",
        markerWidth: "7", markerHeight: "7", orient: "auto-start-reverse",
      });
      marker.appendChild(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: color }));
      defs.appendChild(marker);
    }
    svg.appendChild(defs);
    const root = svgEl("g", {
      transform: `translate(${this.prefs.panX},${this.prefs.panY}) scale(${this.prefs.zoom})`,
    });
    svg.appendChild(root);

    const overlay = this.prefs.logsMode && this.state.lastLogs
      ? logsOverlay(this.state.lastLogs)
      : null;
    const overlayEdges = overlay
      ? new Set(overlay.visibleEdges.map((e) => `${e.src}->${e.dst}`))
      : null;

    for (const edge of model.edges) {
      const a = this.positions.get(edge.src);
      const b = this.positions.get(edge.dst);
      if (!a || !b) continue;
      const style = edgeStyle(edge, this.prefs.filterThreshold, this.prefs.showWeights);
      if (style.hidden && !this.highlightedPath.has(edgeKey(edge))) continue;
      if (overlayEdges && !overlayEdges.has(`${edge.src}->${edge.dst}`)) continue;
      const marker = !edge.directed
        ? ""
        : style.color === COLORS.positive
          ? "url(#arrow-pos)"
          : style.color === COLORS.negative
            ? "url(#arrow-neg)"
            : "url(#arrow-gray)";
      const line = svgEl("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        stroke: style.color,
        "stroke-width": String(style.width),
        class: "edge" + (this.highlightedPath.has(edgeKey(edge)) ? " highlighted" : ""),
      });
      if (style.dashed) line.setAttribute("stroke-dasharray", "6,4");
      if (marker) line.setAttribute("marker-end", marker);
      if (this.selectedEdge && edgeKey(this.selectedEdge) === edgeKey(edge)) {
        line.classList.add("selected");
      }
      line.addEventListener("click", () => this.selectEdge(edge));
      root.appendChild(line);
      if (style.label) {
        root.appendChild(
          this.svgText((a.x + b.x) / 2, (a.y + b.y) / 2 - 4, style.label, "edge-label"),
        );
      }
    }

    for (const node of model.nodes) {
      const pos = this.positions.get(node.name);
      if (!pos) continue;
      const impacted = overlay?.impactedNodes.includes(node.name);
      const group = svgEl("g", { class: "node", transform: `translate(${pos.x},${pos.y})` });
      const circle = svgEl("circle", {
        r: "16",
        fill: impacted ? "#9a9a9a" : node.is_label ? "#f2c14e" : "#f7e3a1",
        stroke: this.selectedNode === node.name ? "#2a6fdb" : "#7a6520",
        "stroke-width": this.selectedNode === node.name ? "3" : "1.5",
      });
      group.appendChild(circle);
      group.appendChild(this.svgText(0, 28, node.name, "node-label"));
      group.addEventListener("click", () => this.selectNode(node.name));
      this.makeDraggable(group, node.name);
      root.appendChild(group);
    }
  }

  private svgText(x: number, y: number, text: string, cls: string): SVGElement {
    const t = svgEl("text", { x: String(x), y: String(y), class: cls, "text-anchor": "middle" });
    t.textContent = text;
    return t;
  }

  private makeDraggable(group: SVGElement, name: string) {
    let dragging = false;
    group.addEventListener("mousedown", (ev) => {
      dragging = true;
      ev.preventDefault();
    });
    window.addEventListener("mousemove", (ev) => {
      if (!dragging) return;
      const pos = this.positions.get(name);
      if (!pos) return;
      pos.x += (ev as MouseEvent).movementX / this.prefs.zoom;
      pos.y += (ev as MouseEvent).movementY / this.prefs.zoom;
      this.renderGraph();
    });
    window.addEventListener("mouseup", () => {
      dragging = false;
    });
  }

  private zoomBy(factor: number) {
    this.prefs.zoom = Math.max(0.3, Math.min(4, this.prefs.zoom * factor));
    this.renderGraph();
  }

  // ----- selection + comparison view ------------------------------------

  private async selectNode(name: string) {
    this.selectedNode = name;
    this.selectedEdge = null;
    byId<HTMLInputElement>("weight-slider").disabled = true;
    this.renderGraph();
    const dist = await this.guard(() => this.state.nodeDistribution(name));
    if (dist) this.renderComparison(dist, `node ${name}`);
  }

  private async selectEdge(edge: GraphEdge) {
    this.selectedEdge = edge;
    this.selectedNode = null;
    const slider = byId<HTMLInputElement>("weight-slider");
    const inDebias = this.state.model?.stage === "debias" && edge.directed;
    slider.disabled = !inDebias;
    if (edge.alpha !== null) slider.value = String(Math.round((edge.alpha - 1) * 100));
    byId<HTMLSelectElement>("src-select").value = edge.src;
    byId<HTMLSelectElement>("dst-select").value = edge.dst;
    this.renderGraph();
    const dist = await this.guard(() => this.state.edgeDistribution(edge.src, edge.dst));
    if (dist) this.renderComparison(dist, `${edge.src} and ${edge.dst}`);
  }

  private renderComparison(dist: DistributionSummary, title: string) {
    byId("comparison-title").textContent = title;
    this.renderDistribution(byId("dist-original"), dist.original);
    this.renderDistribution(byId("dist-debiased"), dist.debiased);
    byId("debiased-stale").classList.toggle("hidden", dist.debiased_available);
  }

  private renderDistribution(container: HTMLElement, summary: Record<string, unknown> & { type: string }) {
    container.innerHTML = "";
    const w = 280;
    const h = 130;
    const svg = svgEl("svg", { viewBox: `0 0 ${w} ${h}`, class: "mini-chart" });
    const plot = (values: number[], labels: string[]) => {
      const max = Math.max(...values, 1);
      const bw = (w - 20) / values.length;
      values.forEach((v, i) => {
        svg.appendChild(
          svgEl("rect", {
            x: String(10 + i * bw + 2),
            y: String(h - 18 - (v / max) * (h - 30)),
            width: String(Math.max(bw - 4, 1)),
            height: String((v / max) * (h - 30)),
            fill: "#5b8db8",
          }),
        );
        if (labels[i] !== undefined) {
          svg.appendChild(this.svgText(10 + i * bw + bw / 2, h - 5, labels[i], "tick-label"));
        }
      });
    };
    if (summary.type === "bars") {
      plot(summary.counts as number[], summary.levels as string[]);
    } else if (summary.type === "histogram") {
      plot(summary.counts as number[], []);
    } else if (summary.type === "grouped_bars") {
      const counts = summary.counts as number[][];
      const aLevels = summary.a_levels as string[];
      const flat = counts.flat();
      plot(flat, aLevels.flatMap((a) => (summary.b_levels as string[]).map((b) => `${a}/${b}`)));
    } else if (summary.type === "scatter") {
      const points = summary.points as [number, number][];
      const xs = points.map((p) => p[0]);
      const ys = points.map((p) => p[1]);
      const xmin = Math.min(...xs), xmax = Math.max(...xs);
      const ymin = Math.min(...ys), ymax = Math.max(...ys);
      for (const [x, y] of points) {
        svg.appendChild(
          svgEl("circle", {
            cx: String(10 + ((x - xmin) / (xmax - xmin || 1)) * (w - 20)),
            cy: String(h - 15 - ((y - ymin) / (ymax - ymin || 1)) * (h - 25)),
            r: "1.6",
            fill: "#5b8db8",
          }),
        );
      }
    } else if (summary.type === "error_bars") {
      const means = summary.means as number[];
      const stds = summary.stds as number[];
      const levels = summary.levels as string[];
      const max = Math.max(...means.map((m, i) => m + stds[i]), 1);
      const bw = (w - 20) / means.length;
      means.forEach((m, i) => {
        const cx = 10 + i * bw + bw / 2;
        const y = h - 18 - (m / max) * (h - 30);
        const half = (stds[i] / max) * (h - 30);
        svg.appendChild(svgEl("circle", { cx: String(cx), cy: String(y), r: "3", fill: "#5b8db8" }));
        svg.appendChild(svgEl("line", {
          x1: String(cx), x2: String(cx), y1: String(y - half), y2: String(y + half),
          stroke: "#5b8db8", "stroke-width": "1.5",
        }));
        svg.appendChild(this.svgText(cx, h - 5, levels[i], "tick-label"));
      });
    }
    container.appendChild(svg);
  }

  // ----- edits -----------------------------------------------------------

  private async editFromTopPanel(op: "add" | "delete" | "reverse" | "direct") {
    const src = byId<HTMLSelectElement>("src-select").value;
    const dst = byId<HTMLSelectElement>("dst-select").value;
    await this.guard(async () => {
      const ok = await this.state.applyEdit({ op, src, dst });
      if (!ok) {
        this.toast(`${op} rejected: ${this.state.lastError?.message}`);
        return;
      }
      this.afterModelChange();
    });
  }

  private async reweightSelected(percent: number) {
    const edge = this.selectedEdge;
    if (!edge) return;
    await this.guard(async () => {
      const ok = await this.state.applyEdit({
        op: "reweight", src: edge.src, dst: edge.dst, weight_percent: percent,
      });
      if (!ok) {
        this.toast(`reweight rejected: ${this.state.lastError?.message}`);
        return;
      }
      this.afterModelChange();
    });
  }

  private async toggleStage(stage: Stage) {
    await this.guard(async () => {
      await this.state.setStage(stage);
      this.afterModelChange();
    });
  }

  private renderBicBar() {
    const model = bicBar(this.state.lastBicDelta);
    const bar = byId("bic-bar");
    bar.style.height = `${model.fraction * 100}%`;
    bar.style.background = model.color;
    byId("bic-delta").textContent = model.text;
    byId("bic-delta").style.color = model.color;
  }

  // ----- paths + logs -----------------------------------------------------

  private async findPaths() {
    const source = byId<HTMLSelectElement>("path-source").value;
    const target = byId<HTMLSelectElement>("path-target").value;
    const resp = await this.guard(() => this.state.findPaths(source, target));
    if (!resp) return;
    const list = byId("paths-list");
    list.innerHTML = "";
    if (resp.paths.length === 0) {
      list.appendChild(el("li", {}, "no directed paths"));
    }
    resp.paths.forEach((path) => {
      const item = el("li", { class: "path-item" }, path.join(" → "));
      item.onclick = () => {
        this.highlightedPath = pathEdgeSet(path);
        this.renderGraph();
        this.animatePath(path);
      };
      list.appendChild(item);
    });
  }

  private animatePath(path: string[]) {
    // flash nodes in order from source to target
    path.forEach((name, i) => {
      window.setTimeout(() => {
        this.selectedNode = name;
        this.renderGraph();
        if (i === path.length - 1) {
          window.setTimeout(() => {
            this.selectedNode = null;
            this.renderGraph();
          }, 350);
        }
      }, i * 350);
    });
  }

  private async toggleLogs() {
    if (!this.prefs.logsMode) {
      await this.guard(() => this.state.refreshLogs());
    }
    this.prefs.logsMode = !this.prefs.logsMode;
    byId<HTMLButtonElement>("btn-logs").classList.toggle("active", this.prefs.logsMode);
    this.renderGraph();
  }

  // ----- custom groups ------------------------------------------------------

  private customGroups: { group_a: SelectionJson[]; group_b: SelectionJson[] } = {
    group_a: [],
    group_b: [],
  };

  private onSensitiveChange() {
    const value = byId<HTMLSelectElement>("sensitive-select").value;
    if (value === "__custom__") this.openCustomGroupModal();
  }

  private openCustomGroupModal() {
    const info = this.state.dataset;
    if (!info) return;
    const modal = byId("custom-group-modal");
    modal.classList.remove("hidden");
    for (const side of ["a", "b"] as const) {
      const host = byId(`group-${side}-columns`);
      host.innerHTML = "";
      for (const col of info.columns) {
        if (col.name === info.label) continue;
        const block = el("div", { class: "group-col" });
        block.appendChild(el("h4", {}, col.name));
        if (col.levels) {
          for (const level of col.levels) {
            const bar = el("button", { class: "level-bar", "data-col": col.name, "data-level": level }, level);
            bar.onclick = () => {
              bar.classList.toggle("selected");
              this.rebuildCustomGroups();
            };
            block.appendChild(bar);
          }
        } else {
          const lo = el("input", { class: "bin-input", placeholder: "min", "data-col": col.name, "data-side": side, "data-kind": "lo" });
          const hi = el("input", { class: "bin-input", placeholder: "max", "data-col": col.name, "data-side": side, "data-kind": "hi" });
          lo.onchange = hi.onchange = () => this.rebuildCustomGroups();
          block.appendChild(lo);
          block.appendChild(hi);
        }
        host.appendChild(block);
      }
    }
  }

  private rebuildCustomGroups() {
    for (const side of ["a", "b"] as const) {
      const host = byId(`group-${side}-columns`);
      const selections = new Map<string, SelectionJson>();
      host.querySelectorAll("button.level-bar.selected").forEach((bar) => {
        const col = bar.getAttribute("data-col")!;
        const level = bar.getAttribute("data-level")!;
        const sel = selections.get(col) ?? { column: col, levels: [] };
        sel.levels = [...(sel.levels ?? []), level];
        selections.set(col, sel);
      });
      host.querySelectorAll("input.bin-input").forEach((inputEl) => {
        const input = inputEl as HTMLInputElement;
        if (!input.value) return;
        const col = input.getAttribute("data-col")!;
        const sel = selections.get(col) ?? { column: col, bin: [NaN, NaN] as [number, number] };
        const bin: [number, number] = sel.bin ?? [NaN, NaN];
        bin[input.getAttribute("data-kind") === "lo" ? 0 : 1] = parseFloat(input.value);
        sel.bin = bin;
        selections.set(col, sel);
      });
      const cleaned = [...selections.values()].filter(
        (s) => (s.levels && s.levels.length > 0) || (s.bin && !s.bin.some(Number.isNaN)),
      );
      if (side === "a") this.customGroups.group_a = cleaned;
      else this.customGroups.group_b = cleaned;
    }
  }

  // ----- evaluation -----------------------------------------------------------

  private async evaluate() {
    const choice = byId<HTMLSelectElement>("sensitive-select").value;
    let groups: GroupSpecJson;
    if (choice === "__custom__") {
      groups = this.customGroups;
    } else {
      const info = this.state.dataset;
      const levels = info?.columns.find((c) => c.name === choice)?.levels ?? [];
      groups = { column: choice, privileged_level: levels[1] ?? levels[0] };
    }
    const favorable = byId<HTMLSelectElement>("favorable-select").value || undefined;
    const seed = parseInt(byId<HTMLInputElement>("seed-input").value || "0", 10);
    const k = parseInt(byId<HTMLInputElement>("k-input").value || "10", 10);
    await this.guard(async () => {
      await this.state.runDebias(seed);
      const report = await this.state.evaluate(groups, { seed, favorable, k });
      this.renderEvaluation(report);
    });
  }

  private renderEvaluation(report: EvaluateResponse) {
    this.renderFourfold(byId("fourfold-original"), report.original, "original");
    this.renderFourfold(byId("fourfold-debiased"), report.debiased, "debiased");
    this.renderMetricBars(report);
    this.renderDonut(report.debiased.distortion);
    const warn = byId("eval-warnings");
    const messages = [
      ...(report.group_overlap_warning ? ["groups overlap"] : []),
      ...report.original.warnings,
      ...report.debiased.warnings,
    ];
    warn.textContent = messages.join("; ");
    warn.classList.toggle("hidden", messages.length === 0);
  }

  private renderFourfold(host: HTMLElement, report: EvaluateResponse["original"], title: string) {
    host.innerHTML = "";
    host.appendChild(el("h4", {}, title));
    const model = fourfoldModel(report.fourfold);
    const size = 180;
    const c = size / 2;
    const maxR = size / 2 - 12;
    const svg = svgEl("svg", { viewBox: `0 0 ${size} ${size}`, class: "fourfold" });
    svg.appendChild(svgEl("line", { x1: String(c), y1: "0", x2: String(c), y2: String(size), stroke: "#ccc" }));
    svg.appendChild(svgEl("line", { x1: "0", y1: String(c), x2: String(size), y2: String(c), stroke: "#ccc" }));
    for (const q of model.quadrants) {
      const r = q.radius * maxR;
      const a0 = (q.startAngle * Math.PI) / 180;
      const a1 = a0 + Math.PI / 2;
      const x0 = c + r * Math.cos(a0);
      const y0 = c - r * Math.sin(a0);
      const x1 = c + r * Math.cos(a1);
      const y1 = c - r * Math.sin(a1);
      const d = `M ${c} ${c} L ${x0} ${y0} A ${r} ${r} 0 0 0 ${x1} ${y1} Z`;
      const favorable = q.key.endsWith("_favorable");
      svg.appendChild(
        svgEl("path", {
          d,
          fill: favorable ? COLORS.positive : COLORS.negative,
          "fill-opacity": "0.75",
        }),
      );
      const labelAngle = a0 + Math.PI / 4;
      const lx = c + (maxR - 8) * Math.cos(labelAngle);
      const ly = c - (maxR - 8) * Math.sin(labelAngle);
      svg.appendChild(this.svgText(lx, ly, `${q.percent.toFixed(1)}%`, "quad-label"));
    }
    svg.appendChild(this.svgText(c / 2, 12, "group A", "tick-label"));
    svg.appendChild(this.svgText(c + c / 2, 12, "group B", "tick-label"));
    host.appendChild(svg);
  }

  private renderMetricBars(report: EvaluateResponse) {
    const host = byId("metric-bars");
    host.innerHTML = "";
    for (const row of metricBars(report)) {
      const wrap = el("div", { class: "metric-row" });
      wrap.appendChild(el("span", { class: "metric-name" }, row.metric));
      const bars = el("div", { class: "metric-bar-pair" });
      for (const [cls, value] of [["orig", row.original], ["deb", row.debiased]] as const) {
        const track = el("div", { class: "bar-track" });
        const fill = el("div", { class: `bar-fill ${cls}` });
        fill.style.width = `${Math.min(100, (value / row.max) * 100)}%`;
        fill.title = String(value);
        track.appendChild(fill);
        const text = row.kind === "utility" ? (value * 100).toFixed(1) : value.toFixed(2);
        track.appendChild(el("span", { class: "bar-value" }, text));
        bars.appendChild(track);
      }
      wrap.appendChild(bars);
      host.appendChild(wrap);
    }
  }

  private renderDonut(distortion: number) {
    const host = byId("donut");
    host.innerHTML = "";
    const model = distortionDonut(distortion);
    const size = 120;
    const c = size / 2;
    const r = 44;
    const svg = svgEl("svg", { viewBox: `0 0 ${size} ${size}`, class: "donut" });
    svg.appendChild(svgEl("circle", { cx: String(c), cy: String(c), r: String(r), fill: "none", stroke: "#e5e5e5", "stroke-width": "14" }));
    const sweep = (model.sweepDegrees * Math.PI) / 180;
    if (model.sweepDegrees > 0) {
      const x = c + r * Math.sin(sweep);
      const y = c - r * Math.cos(sweep);
      const large = model.sweepDegrees > 180 ? 1 : 0;
      svg.appendChild(
        svgEl("path", {
          d: `M ${c} ${c - r} A ${r} ${r} 0 ${large} 1 ${x} ${y}`,
          fill: "none",
          stroke: COLORS.negative,
          "stroke-width": "14",
        }),
      );
    }
    svg.appendChild(this.svgText(c, c + 4, model.text, "donut-label"));
    host.appendChild(svg);
    byId("donut-caption").textContent = "data distortion";
  }
}

const baseUrl = (window as unknown as { SERVICE_URL?: string }).SERVICE_URL ?? "http://127.0.0.1:8000";
const app = new App(new ApiClient(baseUrl));
window.addEventListener("DOMContentLoaded", () => {
  void app.init();
});
