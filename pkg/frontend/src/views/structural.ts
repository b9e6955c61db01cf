/** Structural view: a scatter of nodes coloured by structural cluster next
 * to one average-distance-vector curve per cluster. Dimensions whose pair
 * support falls below a threshold are rendered dimmed so sparsely-backed
 * curve segments are not over-read. */

import { SelectionStore } from "../state.js";
import { Point, fitToPanel, pointsInPolygon } from "../geometry.js";

export const LOW_SUPPORT_THRESHOLD = 10;

export interface StructuralData {
  /** 2-D positions of the nodes (projection of the ego-feature space). */
  points: Point[];
  /** Per-node cluster assignment. */
  assignment: number[];
  /** One mean |Δ| curve per cluster, length = embedding dimension. */
  centroids: number[][];
  /** Pair counts backing each centroid entry; same shape as centroids. */
  support?: number[][];
}

/** Marks which dimensions of each cluster curve have enough backing pairs. */
export function dimmedDimensions(
  support: readonly number[][] | undefined,
  centroids: readonly number[][],
  threshold = LOW_SUPPORT_THRESHOLD,
): boolean[][] {
  return centroids.map((curve, c) =>
    curve.map((_, d) => {
      if (support === undefined) return false;
      return support[c][d] < threshold;
    }),
  );
}

const PANEL_W = 320;
const PANEL_H = 320;

export class StructuralView {
  private unsubscribe: () => void;

  constructor(
    private root: HTMLElement,
    private store: SelectionStore,
    private data: StructuralData,
  ) {
    if (data.points.length !== data.assignment.length) {
      throw new Error("points and assignment must be the same length");
    }
    this.unsubscribe = store.subscribe(() => this.render());
  }

  dispose(): void {
    this.unsubscribe();
  }

  /** Lasso in panel coordinates; selects the captured nodes. */
  lasso(polygon: Point[]): void {
    const fitted = fitToPanel(this.data.points, PANEL_W, PANEL_H);
    const captured = pointsInPolygon(fitted, polygon);
    this.store.lasso("structural", polygon, captured);
  }

  render(): void {
    const { selected } = this.store.get();
    const doc = this.root.ownerDocument;
    this.root.textContent = "";

    const scatter = doc.createElement("div");
    scatter.className = "structural-scatter";
    const fitted = fitToPanel(this.data.points, PANEL_W, PANEL_H);
    for (let i = 0; i < fitted.length; i++) {
      const dot = doc.createElement("span");
      dot.className = selected.has(i) ? "dot selected" : "dot";
      dot.dataset.node = String(i);
      dot.dataset.cluster = String(this.data.assignment[i]);
      dot.style.left = `${fitted[i][0].toFixed(1)}px`;
      dot.style.top = `${fitted[i][1].toFixed(1)}px`;
      scatter.appendChild(dot);
    }
    this.root.appendChild(scatter);

    const dimmed = dimmedDimensions(this.data.support, this.data.centroids);
    const curves = doc.createElement("div");
    curves.className = "distance-curves";
    for (let c = 0; c < this.data.centroids.length; c++) {
      const curveEl = doc.createElement("div");
      curveEl.className = "distance-curve";
      curveEl.dataset.cluster = String(c);
      for (let d = 0; d < this.data.centroids[c].length; d++) {
        const seg = doc.createElement("span");
        seg.className = dimmed[c][d] ? "curve-dim low-support" : "curve-dim";
        seg.dataset.dimension = String(d);
        seg.dataset.value = this.data.centroids[c][d].toPrecision(6);
        curveEl.appendChild(seg);
      }
      curves.appendChild(curveEl);
    }
    this.root.appendChild(curves);
  }
}
