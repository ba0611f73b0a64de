// Bot replay: fetch a synthetic trajectory, animate it, classify it through
// the same pipeline. Replays never touch the human capture session.

import type { ClassifyResponse, PointRow, SynthResponse } from "./types.js";
import type { ClassifyPort } from "./capture.js";

export interface SynthPort {
  synth(type: string, seed: number): Promise<SynthResponse>;
}

export interface ReplayResult {
  type: string;
  seed: number;
  points: PointRow[];
  verdict: ClassifyResponse;
}

/** Frame times (ms from start) for animating a fetched trajectory. */
export function animationSchedule(points: PointRow[]): number[] {
  const t0 = points[0][2];
  return points.map((p) => p[2] - t0);
}

export async function replayBot(
  synthClient: SynthPort,
  classifyClient: ClassifyPort,
  type: string,
  seed: number,
): Promise<ReplayResult> {
  const synth = await synthClient.synth(type, seed);
  const verdict = await classifyClient.classify({ points: synth.points });
  return { type, seed, points: synth.points, verdict };
}
