/**
 * Graph screen: pan/zoom DAG render of the served graph.
 *
 * The rendered edge set is exactly the served one (plus at most one dashed
 * pending edge while an edit is in flight). Edge color encodes the served
 * stability tier; tooltips show the served annotation text.
 */

import type { EdgeTooltip, GraphPayload, NodeMeta } from "./api.js";
import { escapeHtml, sig4 } from "./format.js";
import { layeredLayout, type NodePos } from "./layout.js";

export interface PendingEdge {
  source: string;
  target: string;
}

export interface GraphNodeVM {
  name: string;
  x: number;
  y: number;
  tooltip: string;
}

export interface GraphEdgeVM {
  source: string;
  target: string;
  weight: number;
  stability: number | null;
  tier: string | null;
  tierClass: string;
  tooltip: string;
  pending: boolean;
}

export interface GraphModel {
  version: number;
  datasetId: string | null;
  stale: boolean;
  nodes: GraphNodeVM[];
  edges: GraphEdgeVM[];
  positions: Record<string, NodePos>;
}

export function tierClass(tier: string | null): string {
  return tier === null ? "tier-none" : `tier-${tier.replace(/\s+/g, "-")}`;
}

function nodeTooltip(name: string, meta: NodeMeta | undefined): string {
  if (!meta || meta.unannotated) return `${name}\nno ontology entry`;
  const lines = [name];
  if (meta.description) lines.push(meta.description);
  if (meta.type) lines.push(`type: ${meta.type}`);
  if (meta.unit) lines.push(`unit: ${meta.unit}`);
  if (meta.anomaly_relevance) lines.push(`anomaly relevance: ${meta.anomaly_relevance}`);
  return lines.join("\n");
}

function edgeTooltipFor(
  tooltips: EdgeTooltip[],
  source: string,
  target: string,
  weight: number,
): string {
  const served = tooltips.find((t) => t.source === source && t.target === target);
  return served ? served.text : `${source} -> ${target}; weight ${sig4(weight)}`;
}

/**
 * Pure view model: everything the SVG shows, derived 1:1 from the payload.
 * `knownLatest` marks the model stale when a newer version exists (e.g.
 * an edit was accepted while this screen was showing an older graph).
 */
export function buildGraphModel(
  payload: GraphPayload,
  opts: { knownLatest?: number; pending?: PendingEdge | null; width?: number; height?: number } = {},
): GraphModel {
  const { nodes, edges } = payload.graph;
  const positions = layeredLayout(nodes, edges, opts.width ?? 900, opts.height ?? 560);
  const tooltips = payload.annotations.edge_tooltips;
  const edgeVMs: GraphEdgeVM[] = edges.map((e) => ({
    source: e.source,
    target: e.target,
    weight: e.weight,
    stability: e.stability,
    tier: e.tier,
    tierClass: tierClass(e.tier),
    tooltip: edgeTooltipFor(tooltips, e.source, e.target, e.weight),
    pending: false,
  }));
  const pending = opts.pending;
  if (pending && nodes.includes(pending.source) && nodes.includes(pending.target)) {
    edgeVMs.push({
      source: pending.source,
      target: pending.target,
      weight: 0,
      stability: null,
      tier: null,
      tierClass: "tier-pending",
      tooltip: `${pending.source} -> ${pending.target}; awaiting validation`,
      pending: true,
    });
  }
  return {
    version: payload.version,
    datasetId: payload.dataset_id,
    stale: opts.knownLatest !== undefined && opts.knownLatest > payload.version,
    nodes: nodes.map((n) => ({
      name: n,
      ...positions[n],
      tooltip: nodeTooltip(n, payload.annotations.nodes[n]),
    })),
    edges: edgeVMs,
    positions,
  };
}

const NODE_R = 17;

function edgePath(model: GraphModel, e: GraphEdgeVM): string {
  const a = model.positions[e.source];
  const b = model.positions[e.target];
  // pull the endpoint back to the node rim so arrowheads stay visible
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const len = Math.hypot(dx, dy) || 1;
  const tx = b.x - (dx / len) * (NODE_R + 6);
  const ty = b.y - (dy / len) * (NODE_R + 6);
  // a gentle curve separates edges that share endpoints
  const mx = (a.x + tx) / 2 + (dy / len) * 14;
  const my = (a.y + ty) / 2 - (dx / len) * 14;
  return `M ${a.x.toFixed(1)} ${a.y.toFixed(1)} Q ${mx.toFixed(1)} ${my.toFixed(1)} ${tx.toFixed(1)} ${ty.toFixed(1)}`;
}

/** SVG markup for the model. Every edge carries data-source/data-target so
 * tests (and the tooltip handler) can read the drawn edge set back. */
export function renderGraphSvg(model: GraphModel): string {
  const edges = model.edges
    .map(
      (e) => `
    <path class="edge ${e.tierClass}${e.pending ? " pending" : ""}" d="${edgePath(model, e)}"
      data-source="${escapeHtml(e.source)}" data-target="${escapeHtml(e.target)}"
      data-tooltip="${escapeHtml(e.tooltip)}" marker-end="url(#arrow)"/>`,
    )
    .join("");
  const nodes = model.nodes
    .map(
      (n) => `
    <g class="node" data-node="${escapeHtml(n.name)}" data-tooltip="${escapeHtml(n.tooltip)}"
       transform="translate(${n.x.toFixed(1)},${n.y.toFixed(1)})">
      <circle r="${NODE_R}"/>
      <text dy="4">${escapeHtml(n.name)}</text>
    </g>`,
    )
    .join("");
  return `
  <defs>
    <marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse">
      <path d="M 0 0 L 10 5 L 0 10 z"/>
    </marker>
  </defs>
  <g class="edges">${edges}</g>
  <g class="nodes">${nodes}</g>`;
}

export function versionLabel(model: GraphModel): string {
  const ds = model.datasetId ? ` on ${model.datasetId}` : "";
  return `v${model.version}${ds}${model.stale ? " (stale, refresh to update)" : ""}`;
}

// ---------------------------------------------------------------------------
// DOM wiring

export interface GraphScreen {
  /** Re-fetch and render; remembers the latest seen version for staleness. */
  refresh(): Promise<void>;
  render(payload: GraphPayload, pending?: PendingEdge | null): void;
  /** Draw (or clear, with null) a dashed candidate edge on the last render. */
  showPending(edge: PendingEdge | null): void;
  markKnownVersion(v: number): void;
  /** Node names from the last rendered graph (for selects on other screens). */
  nodeNames(): string[];
}

export function mountGraph(fetchGraph: () => Promise<GraphPayload>): GraphScreen {
  const svg = document.getElementById("graph-svg") as unknown as SVGSVGElement;
  const label = document.getElementById("graph-version")!;
  const tooltip = document.getElementById("tooltip")!;
  const refreshBtn = document.getElementById("graph-refresh") as HTMLButtonElement;
  const emptyNote = document.getElementById("graph-empty")!;

  let knownLatest = 0;
  let lastPayload: GraphPayload | null = null;
  let view = { x: 0, y: 0, w: 900, h: 560 };

  function applyViewBox(): void {
    svg.setAttribute("viewBox", `${view.x} ${view.y} ${view.w} ${view.h}`);
  }

  function render(payload: GraphPayload, pending: PendingEdge | null = null): void {
    lastPayload = payload;
    knownLatest = Math.max(knownLatest, payload.version);
    const model = buildGraphModel(payload, { knownLatest, pending });
    svg.innerHTML = renderGraphSvg(model);
    label.textContent = versionLabel(model);
    label.classList.toggle("stale", model.stale);
    emptyNote.style.display = "none";
    svg.style.display = "";
  }

  // hover tooltips for nodes and edges, fed by data-tooltip attributes
  svg.addEventListener("mousemove", (ev) => {
    const target = (ev.target as Element).closest("[data-tooltip]");
    if (!target) {
      tooltip.classList.remove("visible");
      return;
    }
    tooltip.textContent = target.getAttribute("data-tooltip");
    tooltip.style.left = `${ev.clientX + 14}px`;
    tooltip.style.top = `${ev.clientY + 14}px`;
    tooltip.classList.add("visible");
  });
  svg.addEventListener("mouseleave", () => tooltip.classList.remove("visible"));

  // drag to pan
  let dragging: { x: number; y: number } | null = null;
  svg.addEventListener("mousedown", (ev) => {
    dragging = { x: ev.clientX, y: ev.clientY };
  });
  window.addEventListener("mouseup", () => (dragging = null));
  window.addEventListener("mousemove", (ev) => {
    if (!dragging) return;
    const scale = view.w / svg.clientWidth;
    view.x -= (ev.clientX - dragging.x) * scale;
    view.y -= (ev.clientY - dragging.y) * scale;
    dragging = { x: ev.clientX, y: ev.clientY };
    applyViewBox();
  });

  // wheel to zoom around the cursor
  svg.addEventListener(
    "wheel",
    (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY > 0 ? 1.15 : 1 / 1.15;
      const rect = svg.getBoundingClientRect();
      const px = view.x + ((ev.clientX - rect.left) / rect.width) * view.w;
      const py = view.y + ((ev.clientY - rect.top) / rect.height) * view.h;
      view = {
        x: px - (px - view.x) * factor,
        y: py - (py - view.y) * factor,
        w: view.w * factor,
        h: view.h * factor,
      };
      applyViewBox();
    },
    { passive: false },
  );

  async function refresh(): Promise<void> {
    try {
      render(await fetchGraph());
    } catch (err) {
      if ((err as { status?: number }).status === 404) {
        emptyNote.style.display = "";
        svg.style.display = "none";
        label.textContent = "no graph yet";
        return;
      }
      throw err;
    }
  }
  refreshBtn.addEventListener("click", () => void refresh());
  applyViewBox();

  return {
    refresh,
    render,
    showPending(edge: PendingEdge | null): void {
      if (lastPayload) render(lastPayload, edge);
    },
    markKnownVersion(v: number): void {
      knownLatest = Math.max(knownLatest, v);
      if (lastPayload && lastPayload.version < knownLatest) {
        render(lastPayload); // re-render so the stale badge appears
      }
    },
    nodeNames(): string[] {
      return lastPayload ? [...lastPayload.graph.nodes] : [];
    },
  };
}
