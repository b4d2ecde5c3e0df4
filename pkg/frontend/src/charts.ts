// Population comparison chart: two density curves plus a vertical marker at
// the pair's own value. Path building is pure; drawing is a thin wrapper.

import type { KdeCurve, PopulationJson } from "./api.js";

export interface ChartScale {
  xMin: number;
  xMax: number;
  yMax: number;
}

export function chartScale(curves: KdeCurve[], markerValue: number | null): ChartScale {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMax = 0;
  for (const curve of curves) {
    for (const x of curve.x) {
      if (x < xMin) xMin = x;
      if (x > xMax) xMax = x;
    }
    for (const y of curve.y) {
      if (y > yMax) yMax = y;
    }
  }
  if (markerValue !== null && isFinite(markerValue)) {
    if (markerValue < xMin) xMin = markerValue;
    if (markerValue > xMax) xMax = markerValue;
  }
  if (!isFinite(xMin) || xMin === xMax) {
    const center = isFinite(xMin) ? xMin : 0;
    xMin = center - 1;
    xMax = center + 1;
  }
  return { xMin, xMax, yMax: yMax > 0 ? yMax : 1 };
}

export function xToPixel(scale: ChartScale, width: number, x: number): number {
  return ((x - scale.xMin) / (scale.xMax - scale.xMin)) * width;
}

export function curveToPath(scale: ChartScale, width: number, height: number, curve: KdeCurve): Point[] {
  const pts: Point[] = [];
  for (let i = 0; i < curve.x.length; i++) {
    pts.push([xToPixel(scale, width, curve.x[i]), height - (curve.y[i] / scale.yMax) * (height - 4)]);
  }
  return pts;
}

export type Point = [number, number];

export function drawPopulationChart(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  population: PopulationJson,
  markerValue: number | null,
): void {
  ctx.clearRect(0, 0, width, height);
  const scale = chartScale([population.mated.kde, population.non_mated.kde], markerValue);
  const styles: [KdeCurve, string][] = [
    [population.non_mated.kde, "rgba(214, 39, 40, 0.85)"],
    [population.mated.kde, "rgba(31, 119, 180, 0.85)"],
  ];
  for (const [curve, color] of styles) {
    const path = curveToPath(scale, width, height, curve);
    if (path.length === 0) continue;
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(path[0][0], path[0][1]);
    for (const [x, y] of path.slice(1)) ctx.lineTo(x, y);
    ctx.stroke();
  }
  if (markerValue !== null && isFinite(markerValue)) {
    const mx = xToPixel(scale, width, markerValue);
    ctx.strokeStyle = "#222";
    ctx.lineWidth = 1.5;
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(mx, 0);
    ctx.lineTo(mx, height);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}
