/** Pairwise ranking view: one anchor node, up to four ranked neighbour
 * lists side by side (graph space + up to three embedding spaces), each with
 * an NDCG@k header. A distance-measure toggle re-sorts the embedding
 * columns only — the graph column is measure-independent — and a length
 * slider (default 50) truncates all columns and recomputes the headers. */

import { SelectionStore, MAX_SPACES } from "../state.js";
import { cosineDistance, euclideanDistance } from "../geometry.js";
import { ndcgAtK } from "../ndcg.js";

export type Measure = "cosine" | "euclidean";

export const DEFAULT_LIST_LENGTH = 50;

export interface RankingColumnData {
  spaceId: string;
  /** Row vectors of the embedding; graph column leaves this undefined. */
  vectors?: number[][];
  /** Precomputed ranking for a graph-space column (nearest first). */
  graphOrder?: number[];
}

export interface RankedColumn {
  spaceId: string;
  nodes: number[];
  scores: number[];
  ndcg: number;
}

function rankByDistance(
  anchor: number,
  vectors: number[][],
  measure: Measure,
): { nodes: number[]; scores: number[] } {
  const dist = measure === "cosine" ? cosineDistance : euclideanDistance;
  const a = vectors[anchor];
  const order: Array<[number, number]> = [];
  for (let i = 0; i < vectors.length; i++) {
    if (i === anchor) continue;
    order.push([dist(a, vectors[i]), i]);
  }
  order.sort((p, q) => p[0] - q[0] || p[1] - q[1]);
  return { nodes: order.map((o) => o[1]), scores: order.map((o) => o[0]) };
}

/** Computes all columns for an anchor. The first column (graph space) is the
 * NDCG reference for every embedding column. */
export function computeColumns(
  anchor: number,
  columns: readonly RankingColumnData[],
  measure: Measure,
  k: number,
): RankedColumn[] {
  const embeddingCols = columns.filter((c) => c.vectors !== undefined);
  if (embeddingCols.length > MAX_SPACES) {
    throw new Error(`at most ${MAX_SPACES} embedding columns`);
  }
  const out: RankedColumn[] = [];
  let reference: number[] | null = null;
  for (const col of columns) {
    let nodes: number[];
    let scores: number[];
    if (col.graphOrder !== undefined) {
      nodes = col.graphOrder.filter((n) => n !== anchor);
      scores = nodes.map((_, i) => i + 1);
    } else if (col.vectors !== undefined) {
      ({ nodes, scores } = rankByDistance(anchor, col.vectors, measure));
    } else {
      throw new Error(`column ${col.spaceId} has neither vectors nor order`);
    }
    if (reference === null) reference = nodes;
    out.push({
      spaceId: col.spaceId,
      nodes: nodes.slice(0, k),
      scores: scores.slice(0, k),
      ndcg: ndcgAtK(nodes, reference, k),
    });
  }
  return out;
}

/** Fraction of a node's graph neighbours that also appear in the shown list
 * prefix ("shared friends" bar), and whether the node is a graph neighbour
 * of the anchor at all ("presence" bar). */
export function neighborBars(
  node: number,
  shown: readonly number[],
  neighbors: ReadonlySet<number>,
): { present: boolean; sharedFraction: number } {
  const present = neighbors.has(node);
  if (neighbors.size === 0) return { present, sharedFraction: 0 };
  let shared = 0;
  for (const s of shown) if (neighbors.has(s)) shared += 1;
  return { present, sharedFraction: shared / neighbors.size };
}

export interface RankingViewOptions {
  columns: readonly RankingColumnData[];
  /** Graph adjacency: node → neighbour set, used for the per-row bars. */
  adjacency: ReadonlyMap<number, ReadonlySet<number>>;
}

export class RankingView {
  private measure: Measure = "cosine";
  private k = DEFAULT_LIST_LENGTH;
  private unsubscribe: () => void;

  constructor(
    private root: HTMLElement,
    private store: SelectionStore,
    private opts: RankingViewOptions,
  ) {
    this.unsubscribe = store.subscribe(() => this.render());
  }

  dispose(): void {
    this.unsubscribe();
  }

  setMeasure(measure: Measure): void {
    this.measure = measure;
    this.render();
  }

  setListLength(k: number): void {
    this.k = Math.max(1, Math.floor(k));
    this.render();
  }

  getMeasure(): Measure {
    return this.measure;
  }

  getListLength(): number {
    return this.k;
  }

  render(): void {
    const { anchor, selected } = this.store.get();
    this.root.textContent = "";
    if (anchor === null) {
      const empty = this.root.ownerDocument.createElement("p");
      empty.className = "ranking-empty";
      empty.textContent = "Click a node to anchor the ranking lists.";
      this.root.appendChild(empty);
      return;
    }
    const doc = this.root.ownerDocument;

    const controls = doc.createElement("div");
    controls.className = "ranking-controls";
    const toggle = doc.createElement("button");
    toggle.className = "measure-toggle";
    toggle.textContent = this.measure;
    toggle.addEventListener("click", () =>
      this.setMeasure(this.measure === "cosine" ? "euclidean" : "cosine"),
    );
    const slider = doc.createElement("input");
    slider.type = "range";
    slider.className = "length-slider";
    slider.min = "5";
    slider.max = "200";
    slider.value = String(this.k);
    slider.addEventListener("input", () =>
      this.setListLength(Number(slider.value)),
    );
    controls.append(toggle, slider);
    this.root.appendChild(controls);

    const columns = computeColumns(anchor, this.opts.columns, this.measure, this.k);
    const anchorNeighbors = this.opts.adjacency.get(anchor) ?? new Set<number>();
    const row = doc.createElement("div");
    row.className = "ranking-columns";
    for (const col of columns) {
      const colEl = doc.createElement("div");
      colEl.className = "ranking-column";
      colEl.dataset.space = col.spaceId;
      const header = doc.createElement("h3");
      header.className = "ndcg-header";
      header.textContent = `${col.spaceId} · NDCG@${this.k} = ${col.ndcg.toFixed(3)}`;
      colEl.appendChild(header);
      const list = doc.createElement("ol");
      for (let i = 0; i < col.nodes.length; i++) {
        const node = col.nodes[i];
        const li = doc.createElement("li");
        li.dataset.node = String(node);
        if (selected.has(node)) li.classList.add("selected");
        const bars = neighborBars(node, col.nodes, anchorNeighbors);
        const label = doc.createElement("span");
        label.textContent = `${node} (${col.scores[i].toPrecision(4)})`;
        const presence = doc.createElement("span");
        presence.className = bars.present
          ? "presence-bar present"
          : "presence-bar absent";
        const shared = doc.createElement("span");
        shared.className = "shared-bar";
        shared.style.width = `${Math.round(bars.sharedFraction * 100)}%`;
        li.append(label, presence, shared);
        li.addEventListener("click", () => this.store.setAnchor(node));
        list.appendChild(li);
      }
      colEl.appendChild(list);
      row.appendChild(colEl);
    }
    this.root.appendChild(row);
  }
}
