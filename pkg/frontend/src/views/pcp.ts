/** Cluster-transition view: parallel coordinates over topology metrics with
 * per-axis brushes, flanked by one 2-D projection panel per embedding space
 * and linkage curves that follow the brushed node subset across panels. */

import { SelectionStore } from "../state.js";
import { Point, fitToPanel } from "../geometry.js";

export interface PcpData {
  /** Axis name → per-node metric values, all the same length. */
  axes: ReadonlyMap<string, number[]>;
  /** space id → per-node 2-D projection coordinates. */
  projections: ReadonlyMap<string, Point[]>;
}

export interface AxisScale {
  min: number;
  max: number;
  /** Maps a metric value to a [0, 1] vertical position. */
  toUnit(v: number): number;
}

export function axisScale(values: readonly number[]): AxisScale {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  const span = max - min;
  return {
    min,
    max,
    toUnit: (v) => (span > 0 ? (v - min) / span : 0.5),
  };
}

const PANEL_W = 220;
const PANEL_H = 220;

export class ClusterTransitionView {
  private unsubscribe: () => void;
  private scales = new Map<string, AxisScale>();

  constructor(
    private root: HTMLElement,
    private store: SelectionStore,
    private data: PcpData,
  ) {
    for (const [axis, values] of data.axes) {
      this.scales.set(axis, axisScale(values));
    }
    this.unsubscribe = store.subscribe(() => this.render());
  }

  dispose(): void {
    this.unsubscribe();
  }

  /** Applies a brush in metric units on one axis; null clears that axis. */
  brush(axis: string, range: [number, number] | null): void {
    if (!this.data.axes.has(axis)) throw new Error(`unknown axis ${axis}`);
    this.store.brushAxis(axis, range, (a) => this.data.axes.get(a)!);
  }

  render(): void {
    const { selected, brushes } = this.store.get();
    const doc = this.root.ownerDocument;
    this.root.textContent = "";

    const pcp = doc.createElement("div");
    pcp.className = "pcp-axes";
    const axisNames = [...this.data.axes.keys()];
    const n = axisNames.length > 0 ? this.data.axes.get(axisNames[0])!.length : 0;
    for (const axis of axisNames) {
      const axEl = doc.createElement("div");
      axEl.className = "pcp-axis";
      axEl.dataset.axis = axis;
      const brush = brushes.find((b) => b.axis === axis);
      if (brush !== undefined) {
        axEl.classList.add("brushed");
        axEl.dataset.brushMin = String(brush.min);
        axEl.dataset.brushMax = String(brush.max);
      }
      const label = doc.createElement("span");
      label.textContent = axis;
      axEl.appendChild(label);
      pcp.appendChild(axEl);
    }

    const lines = doc.createElement("div");
    lines.className = "pcp-lines";
    for (let i = 0; i < n; i++) {
      const line = doc.createElement("div");
      line.className = selected.has(i) ? "pcp-line selected" : "pcp-line";
      line.dataset.node = String(i);
      line.dataset.path = axisNames
        .map((a) => this.scales.get(a)!.toUnit(this.data.axes.get(a)![i]).toFixed(4))
        .join(",");
      lines.appendChild(line);
    }
    pcp.appendChild(lines);
    this.root.appendChild(pcp);

    const panels = doc.createElement("div");
    panels.className = "projection-panels";
    for (const [spaceId, points] of this.data.projections) {
      panels.appendChild(this.renderPanel(spaceId, points, selected));
    }
    this.root.appendChild(panels);

    // Linkage curves: one per selected node, connecting its dot across the
    // projection panels in panel order.
    const linkLayer = doc.createElement("div");
    linkLayer.className = "linkage-curves";
    const panelIds = [...this.data.projections.keys()];
    for (const node of [...selected].sort((a, b) => a - b)) {
      const curve = doc.createElement("div");
      curve.className = "linkage-curve";
      curve.dataset.node = String(node);
      curve.dataset.panels = panelIds.join(",");
      linkLayer.appendChild(curve);
    }
    this.root.appendChild(linkLayer);
  }

  private renderPanel(
    spaceId: string,
    points: readonly Point[],
    selected: ReadonlySet<number>,
  ): HTMLElement {
    const doc = this.root.ownerDocument;
    const panel = doc.createElement("div");
    panel.className = "projection-panel";
    panel.dataset.space = spaceId;
    const fitted = fitToPanel(points, PANEL_W, PANEL_H);
    for (let i = 0; i < fitted.length; i++) {
      const dot = doc.createElement("span");
      dot.className = selected.has(i) ? "dot selected" : "dot";
      dot.dataset.node = String(i);
      dot.style.left = `${fitted[i][0].toFixed(1)}px`;
      dot.style.top = `${fitted[i][1].toFixed(1)}px`;
      panel.appendChild(dot);
    }
    return panel;
  }
}
