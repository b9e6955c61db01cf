/** Node-link graph view. Clicking a node makes it the ranking anchor; a
 * lasso selects the enclosed nodes for every linked view. Layout is a
 * deterministic circular embedding — adequate for highlighting, cheap to
 * recompute, and stable across renders. */

import { SelectionStore } from "../state.js";
import { Point, pointsInPolygon } from "../geometry.js";

export interface GraphData {
  nodes: number;
  edges: Array<[number, number]>;
}

const PANEL_W = 400;
const PANEL_H = 400;

export function circularLayout(
  n: number,
  width = PANEL_W,
  height = PANEL_H,
  padding = 12,
): Point[] {
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.min(width, height) / 2 - padding;
  const out: Point[] = [];
  for (let i = 0; i < n; i++) {
    const theta = (2 * Math.PI * i) / Math.max(n, 1);
    out.push([cx + r * Math.cos(theta), cy + r * Math.sin(theta)]);
  }
  return out;
}

export function adjacencyOf(data: GraphData): Map<number, Set<number>> {
  const adj = new Map<number, Set<number>>();
  for (let i = 0; i < data.nodes; i++) adj.set(i, new Set());
  for (const [u, v] of data.edges) {
    adj.get(u)?.add(v);
    adj.get(v)?.add(u);
  }
  return adj;
}

export class GraphView {
  private unsubscribe: () => void;
  private layout: Point[];

  constructor(
    private root: HTMLElement,
    private store: SelectionStore,
    private data: GraphData,
  ) {
    this.layout = circularLayout(data.nodes);
    this.unsubscribe = store.subscribe(() => this.render());
  }

  dispose(): void {
    this.unsubscribe();
  }

  /** Lasso in panel coordinates; selects the enclosed nodes. */
  lasso(polygon: Point[]): void {
    const captured = pointsInPolygon(this.layout, polygon);
    this.store.lasso("graph", polygon, captured);
  }

  clickNode(node: number): void {
    if (node < 0 || node >= this.data.nodes) {
      throw new Error(`node ${node} out of range`);
    }
    this.store.setAnchor(node);
  }

  render(): void {
    const { selected, anchor } = this.store.get();
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    const panel = doc.createElement("div");
    panel.className = "graph-panel";

    for (const [u, v] of this.data.edges) {
      const edge = doc.createElement("span");
      edge.className = "edge";
      edge.dataset.source = String(u);
      edge.dataset.target = String(v);
      if (selected.has(u) && selected.has(v)) edge.classList.add("selected");
      panel.appendChild(edge);
    }

    for (let i = 0; i < this.data.nodes; i++) {
      const dot = doc.createElement("span");
      dot.className = "node";
      dot.dataset.node = String(i);
      if (selected.has(i)) dot.classList.add("selected");
      if (anchor === i) dot.classList.add("anchor");
      dot.style.left = `${this.layout[i][0].toFixed(1)}px`;
      dot.style.top = `${this.layout[i][1].toFixed(1)}px`;
      dot.addEventListener("click", () => this.clickNode(i));
      panel.appendChild(dot);
    }
    this.root.appendChild(panel);
  }
}
