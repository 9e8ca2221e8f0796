/** Deterministic force-directed layout and SVG rendering for answer
 * subgraphs. The layout is seeded and runs a fixed iteration count, so a
 * given subgraph always renders identically (snapshot-friendly). */

import type { SubgraphDto, SubgraphNodeDto } from "./types.js";

export interface LayoutPoint {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations: number;
  seed: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  width: 640,
  height: 420,
  iterations: 150,
  seed: 42,
};

/** mulberry32: tiny deterministic PRNG */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutGraph(
  graph: SubgraphDto,
  options: LayoutOptions = DEFAULT_LAYOUT,
): Map<string, LayoutPoint> {
  const { width, height, iterations, seed } = options;
  const ids = graph.nodes.map((n) => n.node_id).sort();
  const index = new Map(ids.map((id, i) => [id, i]));
  const n = ids.length;
  const positions = new Map<string, LayoutPoint>();
  if (n === 0) return positions;

  const rand = mulberry32(seed);
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    xs[i] = (rand() - 0.5) * width * 0.8;
    ys[i] = (rand() - 0.5) * height * 0.8;
  }

  const edges: [number, number][] = [];
  for (const edge of graph.edges) {
    const a = index.get(edge.src);
    const b = index.get(edge.dst);
    if (a !== undefined && b !== undefined && a !== b) edges.push([a, b]);
  }

  const area = width * height;
  const k = Math.sqrt(area / n);
  let temperature = width / 8;
  const cool = temperature / (iterations + 1);

  for (let iter = 0; iter < iterations; iter++) {
    const dx = new Float64Array(n);
    const dy = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let vx = xs[i]! - xs[j]!;
        let vy = ys[i]! - ys[j]!;
        let dist = Math.hypot(vx, vy);
        if (dist < 1e-6) {
          vx = 1e-3 * (i - j);
          vy = 1e-3;
          dist = Math.hypot(vx, vy);
        }
        const repulse = (k * k) / dist;
        dx[i]! += (vx / dist) * repulse;
        dy[i]! += (vy / dist) * repulse;
        dx[j]! -= (vx / dist) * repulse;
        dy[j]! -= (vy / dist) * repulse;
      }
    }
    for (const [a, b] of edges) {
      const vx = xs[a]! - xs[b]!;
      const vy = ys[a]! - ys[b]!;
      const dist = Math.max(Math.hypot(vx, vy), 1e-6);
      const attract = (dist * dist) / k;
      dx[a]! -= (vx / dist) * attract;
      dy[a]! -= (vy / dist) * attract;
      dx[b]! += (vx / dist) * attract;
      dy[b]! += (vy / dist) * attract;
    }
    for (let i = 0; i < n; i++) {
      const disp = Math.max(Math.hypot(dx[i]!, dy[i]!), 1e-6);
      const step = Math.min(disp, temperature);
      xs[i]! += (dx[i]! / disp) * step;
      ys[i]! += (dy[i]! / disp) * step;
    }
    temperature -= cool;
  }

  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (let i = 0; i < n; i++) {
    minX = Math.min(minX, xs[i]!);
    maxX = Math.max(maxX, xs[i]!);
    minY = Math.min(minY, ys[i]!);
    maxY = Math.max(maxY, ys[i]!);
  }
  const spanX = Math.max(maxX - minX, 1e-6);
  const spanY = Math.max(maxY - minY, 1e-6);
  const pad = 30;
  for (let i = 0; i < n; i++) {
    positions.set(ids[i]!, {
      x: pad + ((xs[i]! - minX) / spanX) * (width - 2 * pad),
      y: pad + ((ys[i]! - minY) / spanY) * (height - 2 * pad),
    });
  }
  return positions;
}

const TYPE_PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
  "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
];

/** Stable color per entity type: alphabetical rank into a fixed palette. */
export function entityTypeColors(nodes: SubgraphNodeDto[]): Map<string, string> {
  const types = [
    ...new Set(
      nodes
        .filter((n) => n.kind === "ENTITY")
        .map((n) => String(n.props["entity_type"] ?? "")),
    ),
  ].sort();
  return new Map(types.map((t, i) => [t, TYPE_PALETTE[i % TYPE_PALETTE.length]!]));
}

export interface RenderCallbacks {
  onEntityClick?: (node: SubgraphNodeDto) => void;
}

/** Render the subgraph into an <svg> element. Only ENTITY nodes and their
 * relation edges are drawn; containment is provenance, not picture. */
export function renderSubgraph(
  svg: SVGSVGElement,
  graph: SubgraphDto,
  callbacks: RenderCallbacks = {},
  options: LayoutOptions = DEFAULT_LAYOUT,
): void {
  const doc = svg.ownerDocument;
  const ns = "http://www.w3.org/2000/svg";
  svg.innerHTML = "";
  svg.setAttribute("viewBox", `0 0 ${options.width} ${options.height}`);

  const entityNodes = graph.nodes.filter((n) => n.kind === "ENTITY");
  const relationEdges = graph.edges.filter((e) => !e.kind.startsWith("HAS_"));
  const drawn: SubgraphDto = { nodes: entityNodes, edges: relationEdges };
  const positions = layoutGraph(drawn, options);
  const colors = entityTypeColors(entityNodes);

  for (const edge of relationEdges) {
    const a = positions.get(edge.src);
    const b = positions.get(edge.dst);
    if (!a || !b) continue;
    const line = doc.createElementNS(ns, "line");
    line.setAttribute("x1", a.x.toFixed(1));
    line.setAttribute("y1", a.y.toFixed(1));
    line.setAttribute("x2", b.x.toFixed(1));
    line.setAttribute("y2", b.y.toFixed(1));
    line.setAttribute("class", "edge");
    svg.appendChild(line);
    const label = doc.createElementNS(ns, "text");
    label.setAttribute("x", ((a.x + b.x) / 2).toFixed(1));
    label.setAttribute("y", ((a.y + b.y) / 2 - 4).toFixed(1));
    label.setAttribute("class", "edge-label");
    label.textContent = edge.kind;
    svg.appendChild(label);
  }

  for (const node of entityNodes) {
    const pos = positions.get(node.node_id);
    if (!pos) continue;
    const group = doc.createElementNS(ns, "g");
    group.setAttribute("class", "entity-node");
    const circle = doc.createElementNS(ns, "circle");
    circle.setAttribute("cx", pos.x.toFixed(1));
    circle.setAttribute("cy", pos.y.toFixed(1));
    circle.setAttribute("r", "14");
    circle.setAttribute(
      "fill",
      colors.get(String(node.props["entity_type"] ?? "")) ?? "#999999",
    );
    group.appendChild(circle);
    const label = doc.createElementNS(ns, "text");
    label.setAttribute("x", pos.x.toFixed(1));
    label.setAttribute("y", (pos.y + 26).toFixed(1));
    label.setAttribute("class", "node-label");
    label.textContent = String(node.props["surface"] ?? node.node_id);
    group.appendChild(label);
    if (callbacks.onEntityClick) {
      group.addEventListener("click", () => callbacks.onEntityClick!(node));
    }
    svg.appendChild(group);
  }
}
