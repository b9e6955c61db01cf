/** Small geometry helpers shared by the scatter panels. */

export type Point = [number, number];

/** Ray-casting point-in-polygon test (even-odd rule). Points exactly on an
 * edge may fall on either side; lasso selection does not need edge cases to
 * be stable. */
export function pointInPolygon(p: Point, polygon: readonly Point[]): boolean {
  if (polygon.length < 3) return false;
  const [x, y] = p;
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const [xi, yi] = polygon[i];
    const [xj, yj] = polygon[j];
    const crosses =
      yi > y !== yj > y && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi;
    if (crosses) inside = !inside;
  }
  return inside;
}

export function pointsInPolygon(
  points: readonly Point[],
  polygon: readonly Point[],
): number[] {
  const out: number[] = [];
  for (let i = 0; i < points.length; i++) {
    if (pointInPolygon(points[i], polygon)) out.push(i);
  }
  return out;
}

export interface Extent {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function extentOf(points: readonly Point[]): Extent {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const [x, y] of points) {
    if (x < xMin) xMin = x;
    if (x > xMax) xMax = x;
    if (y < yMin) yMin = y;
    if (y > yMax) yMax = y;
  }
  return { xMin, xMax, yMin, yMax };
}

/** Maps data coordinates into a width×height panel, preserving aspect ratio
 * and centering; degenerate extents collapse to the panel center. */
export function fitToPanel(
  points: readonly Point[],
  width: number,
  height: number,
  padding = 10,
): Point[] {
  const { xMin, xMax, yMin, yMax } = extentOf(points);
  const spanX = xMax - xMin;
  const spanY = yMax - yMin;
  const span = Math.max(spanX, spanY);
  if (!(span > 0)) {
    return points.map(() => [width / 2, height / 2]);
  }
  const scale = (Math.min(width, height) - 2 * padding) / span;
  const offX = (width - spanX * scale) / 2;
  const offY = (height - spanY * scale) / 2;
  return points.map(([x, y]) => [
    offX + (x - xMin) * scale,
    offY + (y - yMin) * scale,
  ]);
}

export function cosineDistance(a: ArrayLike<number>, b: ArrayLike<number>): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const denom = Math.sqrt(na) * Math.sqrt(nb);
  if (denom === 0) return 1;
  return 1 - dot / denom;
}

export function euclideanDistance(
  a: ArrayLike<number>,
  b: ArrayLike<number>,
): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) {
    const d = a[i] - b[i];
    s += d * d;
  }
  return Math.sqrt(s);
}
