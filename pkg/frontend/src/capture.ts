// Capture session state machine: 8 targets clicked in order, one
// classification per completed segment. Pure logic, no DOM.

import type { ClassifyRequest, ClassifyResponse, PointRow } from "./types.js";

/** Canonical 8-keypoint task layout (pixels), matching the service demo. */
export const KEYPOINTS: [number, number][] = [
  [120, 320],
  [880, 300],
  [140, 90],
  [860, 540],
  [420, 120],
  [430, 520],
  [240, 460],
  [200, 300],
];

export const SEGMENT_DIRECTIONS = ["1-2", "2-3", "3-4", "4-5", "5-6", "6-7", "7-8", "8-1"];

export const TARGET_RADIUS = 18;
export const MIN_SEGMENT_EVENTS = 4;

export type SegmentStatus = "too_short" | "ready" | "classifying" | "done" | "error";

export interface SegmentRecord {
  index: number;
  direction: string;
  points: PointRow[];
  status: SegmentStatus;
  verdict?: ClassifyResponse;
  error?: string;
}

/** Click order: arm on target 1, then 2..8 and back to 1 (8 segments). */
export function clickOrder(): number[] {
  return [0, 1, 2, 3, 4, 5, 6, 7, 0];
}

export class CaptureSession {
  readonly segments: SegmentRecord[] = [];
  rejectedEvents = 0;
  private order = clickOrder();
  private nextClick = 0;
  private events: PointRow[] = [];
  private lastT: number | null = null;

  get started(): boolean {
    return this.nextClick > 0;
  }

  get complete(): boolean {
    return this.nextClick >= this.order.length;
  }

  get expectedTarget(): number | null {
    return this.complete ? null : this.order[this.nextClick];
  }

  private accept(t: number): boolean {
    if (this.lastT !== null && t <= this.lastT) {
      this.rejectedEvents += 1;
      return false;
    }
    this.lastT = t;
    return true;
  }

  /** Record a pointer move; ignored before the session is armed. */
  recordMove(x: number, y: number, tMs: number): void {
    if (!this.started || this.complete) return;
    if (!this.accept(tMs)) return;
    this.events.push([x, y, tMs]);
  }

  /** Record a click; closes a segment when it hits the expected target.
   * Returns the closed segment, or null. */
  recordClick(x: number, y: number, tMs: number): SegmentRecord | null {
    if (this.complete) return null;
    const target = KEYPOINTS[this.order[this.nextClick]];
    if (Math.hypot(x - target[0], y - target[1]) > TARGET_RADIUS) return null;
    if (!this.accept(tMs)) return null;
    if (!this.started) {
      this.nextClick = 1;
      this.events = [[x, y, tMs]];
      return null;
    }
    this.events.push([x, y, tMs]);
    const seg: SegmentRecord = {
      index: this.nextClick - 1,
      direction: SEGMENT_DIRECTIONS[this.nextClick - 1],
      points: this.events.slice(),
      status: this.events.length >= MIN_SEGMENT_EVENTS ? "ready" : "too_short",
    };
    this.segments.push(seg);
    this.nextClick += 1;
    this.events = [[x, y, tMs]]; // the click starts the next segment
    return seg;
  }
}

/** Package a segment for the wire: timestamps re-based to 0 ms. */
export function packageSegment(seg: SegmentRecord): ClassifyRequest {
  const t0 = seg.points[0][2];
  return { points: seg.points.map(([x, y, t]) => [x, y, t - t0] as PointRow) };
}

export interface ClassifyPort {
  classify(req: ClassifyRequest): Promise<ClassifyResponse>;
}

/** Sends ready segments for classification; one call per segment. */
export class SessionController {
  classifyCalls = 0;

  constructor(
    private client: ClassifyPort,
    private onUpdate: (seg: SegmentRecord) => void = () => {},
  ) {}

  async submit(seg: SegmentRecord): Promise<SegmentRecord> {
    if (seg.status !== "ready") {
      this.onUpdate(seg);
      return seg; // too-short segments are never sent
    }
    seg.status = "classifying";
    this.onUpdate(seg);
    this.classifyCalls += 1;
    try {
      seg.verdict = await this.client.classify(packageSegment(seg));
      seg.status = "done";
    } catch (err) {
      seg.status = "error";
      seg.error = err instanceof Error ? err.message : String(err);
    }
    this.onUpdate(seg);
    return seg;
  }
}
