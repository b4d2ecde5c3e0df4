// Alignment overlay: fit both clouds into one canvas viewport and draw the
// questioned print under the aligned known print. The projection math is
// pure so it can be tested without a canvas.

export type Point = [number, number];

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
  height: number;
}

export function fitViewport(
  clouds: Point[][],
  width: number,
  height: number,
  margin = 10,
): Viewport {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const cloud of clouds) {
    for (const [x, y] of cloud) {
      if (x < minX) minX = x;
      if (y < minY) minY = y;
      if (x > maxX) maxX = x;
      if (y > maxY) maxY = y;
    }
  }
  if (!isFinite(minX)) {
    return { scale: 1, offsetX: 0, offsetY: 0, height };
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  return {
    scale,
    offsetX: margin - minX * scale,
    offsetY: margin - minY * scale,
    height,
  };
}

export function project(view: Viewport, point: Point): Point {
  // plane y grows upward; canvas y grows downward
  const cx = point[0] * view.scale + view.offsetX;
  const cy = view.height - (point[1] * view.scale + view.offsetY);
  return [cx, cy];
}

export function drawOverlay(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  qPoints: Point[],
  kStarPoints: Point[],
  showQ: boolean,
  showK: boolean,
): void {
  ctx.clearRect(0, 0, width, height);
  const view = fitViewport([qPoints, kStarPoints], width, height);
  const layers: [Point[], string, boolean][] = [
    [qPoints, "rgba(31, 119, 180, 0.7)", showQ],
    [kStarPoints, "rgba(214, 39, 40, 0.55)", showK],
  ];
  for (const [points, color, visible] of layers) {
    if (!visible) continue;
    ctx.fillStyle = color;
    for (const p of points) {
      const [cx, cy] = project(view, p);
      ctx.fillRect(cx, cy, 1.6, 1.6);
    }
  }
}
