/** Live 2-D projection panel fed by the server's snapshot stream. While the
 * stream is disconnected the panel shows a "stale" badge; reconnection picks
 * up after the last rendered snapshot via Last-Event-ID. */

import { SelectionStore } from "../state.js";
import { Point, fitToPanel, pointsInPolygon } from "../geometry.js";
import { ProjectionStream, ProjectionSnapshot, FetchLike } from "../api.js";

const PANEL_W = 300;
const PANEL_H = 300;

export class ProjectionView {
  private unsubscribe: () => void;
  private points: Point[] = [];
  private iteration = -1;
  private stale = false;
  private stream: ProjectionStream | null = null;

  constructor(
    private root: HTMLElement,
    private store: SelectionStore,
    public readonly spaceId: string,
  ) {
    this.unsubscribe = store.subscribe(() => this.render());
  }

  dispose(): void {
    this.stream?.close();
    this.unsubscribe();
  }

  /** Connects to the snapshot stream for an already-submitted projection
   * job; resolves when the stream finishes. */
  follow(baseUrl: string, jobId: string, fetchFn?: FetchLike): Promise<void> {
    this.stream?.close();
    this.stream = new ProjectionStream(
      baseUrl,
      jobId,
      {
        onSnapshot: (snap) => this.applySnapshot(snap),
        onStale: (stale) => {
          this.stale = stale;
          this.render();
        },
        onDone: () => this.render(),
      },
      fetchFn,
    );
    return this.stream.run();
  }

  applySnapshot(snap: ProjectionSnapshot): void {
    // A reconnect may replay the last-acknowledged snapshot; never go back.
    if (snap.iteration <= this.iteration) return;
    this.iteration = snap.iteration;
    this.points = snap.points;
    this.render();
  }

  getIteration(): number {
    return this.iteration;
  }

  isStale(): boolean {
    return this.stale;
  }

  lasso(polygon: Point[]): void {
    const fitted = fitToPanel(this.points, PANEL_W, PANEL_H);
    const captured = pointsInPolygon(fitted, polygon);
    this.store.lasso(`projection:${this.spaceId}`, polygon, captured);
  }

  render(): void {
    const { selected } = this.store.get();
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    const panel = doc.createElement("div");
    panel.className = "projection-live";
    panel.dataset.space = this.spaceId;
    panel.dataset.iteration = String(this.iteration);
    if (this.stale) {
      const badge = doc.createElement("span");
      badge.className = "stale-badge";
      badge.textContent = "stale";
      panel.appendChild(badge);
    }
    const fitted = fitToPanel(this.points, PANEL_W, PANEL_H);
    for (let i = 0; i < fitted.length; i++) {
      const dot = doc.createElement("span");
      dot.className = selected.has(i) ? "dot selected" : "dot";
      dot.dataset.node = String(i);
      dot.style.left = `${fitted[i][0].toFixed(1)}px`;
      dot.style.top = `${fitted[i][1].toFixed(1)}px`;
      panel.appendChild(dot);
    }
    this.root.appendChild(panel);
  }
}
