import { ServiceClient } from "./api.js";
import { CaptureSession, SessionController, type SegmentRecord } from "./capture.js";
import { animationSchedule, replayBot } from "./replay.js";
import {
  drawTask,
  drawVelocityChart,
  renderFeatureTable,
  renderSegmentList,
  verdictBadge,
} from "./render.js";
import type { PointRow } from "./types.js";

const BASE_URL =
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8000";

const client = new ServiceClient(BASE_URL);
const canvas = document.getElementById("task") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const chart = (document.getElementById("chart") as HTMLCanvasElement).getContext("2d")!;
const segmentList = document.getElementById("segments") as HTMLElement;
const featureRoot = document.getElementById("features") as HTMLElement;
const statusLine = document.getElementById("status") as HTMLElement;
const replayVerdict = document.getElementById("replay-verdict") as HTMLElement;
const replaySelect = document.getElementById("replay-type") as HTMLSelectElement;
const toast = document.getElementById("toast") as HTMLElement;

let session = new CaptureSession();
const controller = new SessionController(client, onSegmentUpdate);
let trail: PointRow[] = [];
let replayTrail: PointRow[] = [];
let replaySeed = 0;

function showToast(message: string): void {
  toast.textContent = message;
  toast.classList.add("visible");
  setTimeout(() => toast.classList.remove("visible"), 4000);
}

function redraw(): void {
  drawTask(ctx, trail, session.expectedTarget, replayTrail);
}

function onSegmentUpdate(seg: SegmentRecord): void {
  renderSegmentList(segmentList, session.segments);
  if (seg.status === "done" && seg.verdict) {
    statusLine.textContent = `segment ${seg.direction}: ${verdictBadge(seg.verdict)}`;
    drawVelocityChart(chart, seg.points, seg.verdict);
    renderFeatureTable(featureRoot, seg.verdict.features);
  } else if (seg.status === "error") {
    showToast(`classification failed: ${seg.error}`);
  }
}

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  session.recordMove(ev.clientX - rect.left, ev.clientY - rect.top, ev.timeStamp);
  if (session.started && !session.complete) {
    trail.push([ev.clientX - rect.left, ev.clientY - rect.top, ev.timeStamp]);
    redraw();
  }
});

canvas.addEventListener("pointerdown", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const seg = session.recordClick(
    ev.clientX - rect.left, ev.clientY - rect.top, ev.timeStamp);
  trail = [];
  if (seg) void controller.submit(seg);
  if (session.complete) {
    statusLine.textContent =
      `task complete: ${controller.classifyCalls} segments classified`;
  } else if (session.started) {
    statusLine.textContent = `click target ${((session.expectedTarget ?? 0) + 1)}`;
  }
  redraw();
});

(document.getElementById("restart") as HTMLButtonElement).addEventListener("click", () => {
  session = new CaptureSession();
  trail = [];
  replayTrail = [];
  segmentList.innerHTML = "";
  statusLine.textContent = "click target 1 to start";
  redraw();
});

(document.getElementById("replay") as HTMLButtonElement).addEventListener("click", async () => {
  try {
    replaySeed += 1;
    const result = await replayBot(client, client, replaySelect.value, replaySeed);
    const schedule = animationSchedule(result.points);
    replayTrail = [];
    result.points.forEach((p, i) => {
      setTimeout(() => {
        replayTrail.push(p);
        redraw();
      }, schedule[i]);
    });
    replayVerdict.textContent =
      `replayed ${result.type} #${replaySeed}: ${verdictBadge(result.verdict)}`;
  } catch (err) {
    showToast(`replay failed: ${err instanceof Error ? err.message : err}`);
  }
});

async function boot(): Promise<void> {
  try {
    const health = await client.health();
    statusLine.textContent =
      health.status === "ok"
        ? "click target 1 to start"
        : "service degraded: no model loaded";
    const { types } = await client.synthTypes();
    replaySelect.innerHTML = "";
    for (const t of types) {
      const opt = document.createElement("option");
      opt.value = t;
      opt.textContent = t;
      replaySelect.appendChild(opt);
    }
  } catch {
    statusLine.textContent = `service unreachable at ${BASE_URL}`;
  }
  redraw();
}

void boot();
