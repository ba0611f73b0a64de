// DOM and canvas rendering. Kept thin: all decisions and math live in the
// pure modules; this file only draws their outputs.

import { KEYPOINTS, TARGET_RADIUS, type SegmentRecord } from "./capture.js";
import { reconstruct, strokeCurves, velocityProfile } from "./lognormal.js";
import type { ClassifyResponse, PointRow } from "./types.js";

export function drawTask(
  ctx: CanvasRenderingContext2D,
  trail: PointRow[],
  expectedTarget: number | null,
  replayTrail: PointRow[] = [],
): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);

  KEYPOINTS.forEach(([x, y], i) => {
    ctx.beginPath();
    ctx.arc(x, y, TARGET_RADIUS, 0, Math.PI * 2);
    ctx.fillStyle = i === expectedTarget ? "#ffd54f" : "#e0e0e0";
    ctx.fill();
    ctx.strokeStyle = "#616161";
    ctx.stroke();
    ctx.fillStyle = "#212121";
    ctx.font = "12px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(String(i + 1), x, y);
  });

  const drawTrail = (points: PointRow[], color: string) => {
    if (points.length < 2) return;
    ctx.beginPath();
    ctx.moveTo(points[0][0], points[0][1]);
    for (const [x, y] of points.slice(1)) ctx.lineTo(x, y);
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.stroke();
    ctx.lineWidth = 1;
  };
  drawTrail(trail, "#1565c0");
  drawTrail(replayTrail, "#c62828");
}

export function verdictBadge(resp: ClassifyResponse): string {
  return `${resp.label} (${resp.score.toFixed(2)})`;
}

export function renderSegmentList(root: HTMLElement, segments: SegmentRecord[]): void {
  root.innerHTML = "";
  for (const seg of segments) {
    const li = document.createElement("li");
    li.className = `segment ${seg.status}`;
    let text = `${seg.direction}: `;
    if (seg.status === "too_short") text += "too short — not sent";
    else if (seg.status === "classifying") text += "classifying…";
    else if (seg.status === "error") text += `error: ${seg.error}`;
    else if (seg.verdict) text += verdictBadge(seg.verdict);
    li.textContent = text;
    root.appendChild(li);
  }
}

/** Velocity chart: raw speed, per-stroke curves, and their sum. */
export function drawVelocityChart(
  ctx: CanvasRenderingContext2D,
  points: PointRow[],
  resp: ClassifyResponse,
): void {
  const { canvas } = ctx;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const vp = velocityProfile(points);
  if (vp.t.length < 2) return;
  const tMax = vp.t[vp.t.length - 1];
  const grid = Array.from({ length: 240 }, (_, i) => (tMax * i) / 239);
  const curves = strokeCurves(resp.decomposition, grid);
  const total = reconstruct(resp.decomposition, grid);
  const vMax = Math.max(...vp.v, ...total, 1e-9) * 1.08;

  const sx = (t: number) => (t / tMax) * (canvas.width - 20) + 10;
  const sy = (v: number) => canvas.height - 14 - (v / vMax) * (canvas.height - 24);

  const polyline = (ts: number[], vs: number[], color: string, dash: number[]) => {
    ctx.beginPath();
    ctx.setLineDash(dash);
    ctx.moveTo(sx(ts[0]), sy(vs[0]));
    for (let i = 1; i < ts.length; i++) ctx.lineTo(sx(ts[i]), sy(vs[i]));
    ctx.strokeStyle = color;
    ctx.stroke();
    ctx.setLineDash([]);
  };

  polyline(vp.t, vp.v, "#212121", []);
  for (const curve of curves) polyline(grid, curve, "#2e7d32", [4, 3]);
  polyline(grid, total, "#c62828", [2, 2]);
}

export function renderFeatureTable(root: HTMLElement, features: Record<string, number>): void {
  root.innerHTML = "";
  const table = document.createElement("table");
  for (const [name, value] of Object.entries(features)) {
    const row = table.insertRow();
    row.insertCell().textContent = name;
    row.insertCell().textContent = value.toPrecision(5);
  }
  root.appendChild(table);
}
