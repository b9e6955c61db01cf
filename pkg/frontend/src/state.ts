/** Single source of truth for cross-view selection.
 *
 * Every mounted view subscribes to this store and re-renders its highlights
 * from the same state object, which is what keeps lasso/brush/click
 * selections consistent everywhere.
 */

export const MAX_SPACES = 3;

export interface BrushRange {
  axis: string;
  min: number;
  max: number;
}

export interface LassoPolygon {
  panelId: string;
  /** Polygon vertices in panel coordinates. */
  points: Array<[number, number]>;
}

export interface SelectionState {
  /** Node indices currently highlighted (intersection of active filters). */
  readonly selected: ReadonlySet<number>;
  /** Ranking anchor, if a node has been clicked. */
  readonly anchor: number | null;
  /** Active embedding space ids, graph space excluded, max MAX_SPACES. */
  readonly spaces: readonly string[];
  readonly brushes: readonly BrushRange[];
  readonly lassos: readonly LassoPolygon[];
}

export type Listener = (state: SelectionState) => void;

const EMPTY: SelectionState = {
  selected: new Set(),
  anchor: null,
  spaces: [],
  brushes: [],
  lassos: [],
};

export class SelectionStore {
  private state: SelectionState = EMPTY;
  private listeners = new Set<Listener>();

  get(): SelectionState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.add(fn);
    fn(this.state);
    return () => this.listeners.delete(fn);
  }

  private commit(next: SelectionState): void {
    this.state = next;
    for (const fn of this.listeners) fn(next);
  }

  setSelected(nodes: Iterable<number>): void {
    this.commit({ ...this.state, selected: new Set(nodes) });
  }

  clearSelection(): void {
    this.commit({ ...this.state, selected: new Set(), brushes: [], lassos: [] });
  }

  setAnchor(node: number | null): void {
    this.commit({ ...this.state, anchor: node });
  }

  addSpace(spaceId: string): void {
    if (this.state.spaces.includes(spaceId)) return;
    if (this.state.spaces.length >= MAX_SPACES) {
      throw new Error(`at most ${MAX_SPACES} embedding spaces`);
    }
    this.commit({ ...this.state, spaces: [...this.state.spaces, spaceId] });
  }

  removeSpace(spaceId: string): void {
    this.commit({
      ...this.state,
      spaces: this.state.spaces.filter((s) => s !== spaceId),
    });
  }

  /** Replace the brush on one axis (empty range removes it), then
   * recompute the selection from all active brushes over the metric rows. */
  brushAxis(
    axis: string,
    range: [number, number] | null,
    axisValues: (axis: string) => ArrayLike<number>,
  ): void {
    const brushes = this.state.brushes.filter((b) => b.axis !== axis);
    if (range !== null) {
      brushes.push({ axis, min: Math.min(...range), max: Math.max(...range) });
    }
    let selected: Set<number>;
    if (brushes.length === 0) {
      selected = new Set();
    } else {
      const n = axisValues(brushes[0].axis).length;
      selected = new Set<number>();
      outer: for (let i = 0; i < n; i++) {
        for (const b of brushes) {
          const v = axisValues(b.axis)[i];
          if (v < b.min || v > b.max) continue outer;
        }
        selected.add(i);
      }
    }
    this.commit({ ...this.state, brushes, selected });
  }

  lasso(
    panelId: string,
    polygon: Array<[number, number]>,
    captured: Iterable<number>,
  ): void {
    const lassos = this.state.lassos.filter((l) => l.panelId !== panelId);
    lassos.push({ panelId, points: polygon });
    this.commit({ ...this.state, lassos, selected: new Set(captured) });
  }
}
