// Client-side recomputation of the stroke speed curves from the parameters
// returned by the service, used only for chart overlays. All verdicts come
// from the server.

import type { StrokeParams } from "./types.js";

const SQRT_2PI = Math.sqrt(2 * Math.PI);

/** Speed of one stroke at time t (seconds); 0 at or before its onset. */
export function strokeVelocity(s: StrokeParams, t: number): number {
  const tau = t - s.t0;
  if (tau <= 0) return 0;
  const ln = Math.log(tau) - s.mu;
  return (s.D / (SQRT_2PI * s.sigma * tau)) * Math.exp(-(ln * ln) / (2 * s.sigma * s.sigma));
}

/** Per-stroke curves sampled on a shared time grid. */
export function strokeCurves(strokes: StrokeParams[], ts: number[]): number[][] {
  return strokes.map((s) => ts.map((t) => strokeVelocity(s, t)));
}

/** Pointwise sum of all stroke curves (the reconstruction overlay). */
export function reconstruct(strokes: StrokeParams[], ts: number[]): number[] {
  const total = new Array<number>(ts.length).fill(0);
  for (const s of strokes) {
    for (let i = 0; i < ts.length; i++) total[i] += strokeVelocity(s, ts[i]);
  }
  return total;
}

/** Finite-difference speed profile of raw captured points (for the chart). */
export function velocityProfile(points: [number, number, number][]): { t: number[]; v: number[] } {
  const t: number[] = [];
  const v: number[] = [];
  for (let i = 1; i < points.length; i++) {
    const [x0, y0, t0] = points[i - 1];
    const [x1, y1, t1] = points[i];
    const dt = (t1 - t0) / 1000;
    if (dt <= 0) continue;
    t.push((t0 + t1) / 2000);
    v.push(Math.hypot(x1 - x0, y1 - y0) / dt);
  }
  return { t, v };
}
