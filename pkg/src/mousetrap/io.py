"""Dataset ingestion, JSONL exchange formats, and benchmark assembly.

On-disk conventions (all version 1):
  raw events   CSV with header `timestamp,event,x,y` (timestamp in ms)
  trajectories JSONL; first line {"schema_version": 1, "kind": "trajectories"},
               then {"id", "label", "attack_type", "direction", "points"}
               with points [[x, y, t_ms], ...] (integer milliseconds)
  features     JSONL; header also carries "feature_schema" and "names",
               rows carry "values"
  manifest     JSON object with per-tag counts
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .classify.dataset import LabeledDataset
from .errors import ConfigError, DataError
from .features import SCHEMAS
from .surrogate import sample_human_trajectory
from .synth import (
    ATTACK_TAGS,
    DIRECTIONS,
    DirectionStats,
    VelocityKind,
    default_shape_ranges,
    estimate_direction_stats,
    estimate_shape_ranges,
    sample_point_count,
    sample_shape_spec,
    split_attack_tag,
)
from .trajectory import Trajectory

__all__ = [
    "RawEvent", "ParseResult", "read_events_csv", "parse_raw_events",
    "save_trajectories_jsonl", "load_trajectories_jsonl",
    "save_features_jsonl", "load_features_jsonl",
    "BenchmarkSpec", "build_benchmark", "write_benchmark",
]

SCHEMA_VERSION = 1
VALID_ATTACK_TYPES = ("human",) + ATTACK_TAGS


class RawEvent(NamedTuple):
    timestamp_ms: int
    event: str
    x: float
    y: float


class ParseResult(NamedTuple):
    trajectories: list
    dropped: int


def read_events_csv(path) -> list[RawEvent]:
    """Parse the raw capture CSV; malformed rows fail with their line number."""
    events: list[RawEvent] = []
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip().lower().rstrip("\r")
        if [c.strip() for c in header.split(",")] != ["timestamp", "event", "x", "y"]:
            raise DataError(f"{path}: expected header 'timestamp,event,x,y', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            ts, ev, xs, ys = parts
            if ev not in ("move", "click"):
                raise DataError(f"{path}:{lineno}: unknown event {ev!r}")
            try:
                events.append(RawEvent(int(ts), ev, float(xs), float(ys)))
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return events


def parse_raw_events(events, assign_directions: bool = False) -> ParseResult:
    """Split an event log at clicks; each inter-click movement (click
    endpoints included) becomes one trajectory. Segments shorter than 4
    points are dropped and counted.

    With assign_directions the segments are tagged with the 8-keypoint task
    order 1-2, 2-3, ..., 8-1 cyclically.
    """
    last_ts = None
    for i, ev in enumerate(events):
        if last_ts is not None and ev.timestamp_ms < last_ts:
            raise DataError(f"event {i}: timestamps decrease")
        last_ts = ev.timestamp_ms
    clicks = [i for i, ev in enumerate(events) if ev.event == "click"]
    trajectories = []
    dropped = 0
    for seg_no, (a, b) in enumerate(zip(clicks[:-1], clicks[1:])):
        rows = events[a:b + 1]
        # collapse repeated timestamps (keep the latest position)
        dedup: list[RawEvent] = []
        for ev in rows:
            if dedup and ev.timestamp_ms == dedup[-1].timestamp_ms:
                dedup[-1] = ev
            else:
                dedup.append(ev)
        if len(dedup) < 4:
            dropped += 1
            continue
        direction = DIRECTIONS[seg_no % len(DIRECTIONS)] if assign_directions else None
        trajectories.append(Trajectory(
            np.array([e.x for e in dedup]),
            np.array([e.y for e in dedup]),
            np.array([e.timestamp_ms for e in dedup], dtype=float) / 1000.0,
            direction=direction, source="human"))
    return ParseResult(trajectories, dropped)


# ---------------------------------------------------------------------------
# JSONL trajectories
# ---------------------------------------------------------------------------

def _check_header(line: str, kind: str, path) -> dict:
    try:
        header = json.loads(line)
    except json.JSONDecodeError:
        raise DataError(f"{path}:1: header is not valid JSON") from None
    if header.get("schema_version") != SCHEMA_VERSION:
        raise DataError(
            f"{path}: incompatible schema_version {header.get('schema_version')!r}, "
            f"this build reads version {SCHEMA_VERSION}")
    if header.get("kind") != kind:
        raise DataError(f"{path}: expected kind {kind!r}, got {header.get('kind')!r}")
    return header


def _label_of(attack_type: str) -> int:
    return 1 if attack_type == "human" else 0


def save_trajectories_jsonl(path, ds: LabeledDataset, ids=None) -> None:
    if ds.kind != "trajectories":
        raise DataError("expected a raw-trajectory dataset")
    ids = ids or [f"{i:06d}" for i in range(len(ds))]
    with open(path, "w") as fh:
        fh.write(json.dumps({"schema_version": SCHEMA_VERSION, "kind": "trajectories"},
                            sort_keys=True) + "\n")
        for rid, tr, label, attack, direction in zip(
                ids, ds.trajectories, ds.y, ds.attack_types, ds.directions):
            points = [[float(x), float(y), int(round(t * 1000.0))]
                      for x, y, t in zip(tr.x, tr.y, tr.t)]
            rec = {"id": rid, "label": int(label), "attack_type": attack,
                   "direction": direction, "points": points}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_trajectories_jsonl(path) -> tuple[LabeledDataset, list[str]]:
    trajs, labels, attacks, directions, ids = [], [], [], [], []
    with open(path) as fh:
        _check_header(fh.readline(), "trajectories", path)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                raise DataError(f"{path}:{lineno}: malformed JSON") from None
            attack = rec.get("attack_type")
            if attack not in VALID_ATTACK_TYPES:
                raise DataError(f"{path}:{lineno}: unknown attack_type {attack!r}")
            if int(rec["label"]) != _label_of(attack):
                raise DataError(f"{path}:{lineno}: label inconsistent with attack_type")
            direction = rec.get("direction")
            if direction is not None and direction not in DIRECTIONS:
                raise DataError(f"{path}:{lineno}: unknown direction {direction!r}")
            pts = np.asarray(rec["points"], dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 3:
                raise DataError(f"{path}:{lineno}: points must be [[x, y, t_ms], ...]")
            try:
                tr = Trajectory(pts[:, 0], pts[:, 1], pts[:, 2] / 1000.0,
                                direction=direction,
                                source=attack if attack != "human" else "human")
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            trajs.append(tr)
            labels.append(int(rec["label"]))
            attacks.append(attack)
            directions.append(direction)
            ids.append(str(rec["id"]))
    ds = LabeledDataset(np.array(labels, dtype=int), attacks, directions,
                        trajectories=trajs)
    return ds, ids


# ---------------------------------------------------------------------------
# JSONL feature vectors
# ---------------------------------------------------------------------------

def save_features_jsonl(path, ds: LabeledDataset, ids=None) -> None:
    if ds.kind != "features":
        raise DataError("expected a feature dataset")
    ids = ids or [f"{i:06d}" for i in range(len(ds))]
    header = {"schema_version": SCHEMA_VERSION, "kind": "features",
              "feature_schema": ds.schema, "names": list(SCHEMAS[ds.schema])}
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rid, row, label, attack, direction in zip(
                ids, ds.X, ds.y, ds.attack_types, ds.directions):
            rec = {"id": rid, "label": int(label), "attack_type": attack,
                   "direction": direction, "values": [float(v) for v in row]}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_features_jsonl(path) -> tuple[LabeledDataset, list[str]]:
    with open(path) as fh:
        header = _check_header(fh.readline(), "features", path)
        schema = header.get("feature_schema")
        if schema not in SCHEMAS:
            raise DataError(f"{path}: unknown feature_schema {schema!r}")
        width = len(SCHEMAS[schema])
        rows, labels, attacks, directions, ids = [], [], [], [], []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                raise DataError(f"{path}:{lineno}: malformed JSON") from None
            attack = rec.get("attack_type")
            if attack not in VALID_ATTACK_TYPES:
                raise DataError(f"{path}:{lineno}: unknown attack_type {attack!r}")
            vals = rec["values"]
            if len(vals) != width:
                raise DataError(f"{path}:{lineno}: expected {width} values, got {len(vals)}")
            rows.append(vals)
            labels.append(int(rec["label"]))
            attacks.append(attack)
            directions.append(rec.get("direction"))
            ids.append(str(rec["id"]))
    ds = LabeledDataset(np.array(labels, dtype=int), attacks, directions,
                        X=np.array(rows, dtype=float), schema=schema)
    return ds, ids


# ---------------------------------------------------------------------------
# benchmark assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkSpec:
    """Requested composition: human-like rows plus per-attack bot counts."""

    n_human_like: int
    attacks: dict = field(default_factory=dict)
    seed: int = 0
    rate_hz: float = 200.0

    def __post_init__(self):
        if self.n_human_like < 0:
            raise ConfigError("n_human_like must be >= 0")
        for tag, count in self.attacks.items():
            if tag not in ATTACK_TAGS:
                raise ConfigError(f"unknown attack tag {tag!r}")
            if count < 0:
                raise ConfigError(f"negative count for {tag!r}")

    @classmethod
    def from_json(cls, path) -> "BenchmarkSpec":
        with open(path) as fh:
            d = json.load(fh)
        return cls(n_human_like=int(d["n_human_like"]),
                   attacks={k: int(v) for k, v in d.get("attacks", {}).items()},
                   seed=int(d.get("seed", 0)),
                   rate_hz=float(d.get("rate_hz", 200.0)))

    def as_dict(self) -> dict:
        return {"n_human_like": self.n_human_like, "attacks": dict(self.attacks),
                "seed": self.seed, "rate_hz": self.rate_hz}


def build_benchmark(spec: BenchmarkSpec, human_source, gan_bundle=None):
    """Deterministically assemble a labeled raw-trajectory dataset.

    Humans are drawn from `human_source` (without replacement); function
    bots reuse the endpoints/direction of seeded random humans with point
    counts from the per-direction statistics; gan bots need a trained bundle.
    Returns (dataset, manifest).
    """
    humans = list(human_source)
    if not humans:
        raise DataError("human source is empty")
    gan_count = spec.attacks.get("gan", 0)
    if gan_count > 0 and gan_bundle is None:
        raise ConfigError("benchmark requests gan bots but no bundle was given")
    if spec.n_human_like > len(humans):
        raise DataError(
            f"requested {spec.n_human_like} humans but source has {len(humans)}")
    rng = np.random.default_rng(spec.seed)

    try:
        stats = estimate_direction_stats(humans)
    except DataError:
        stats = None
    try:
        ranges = estimate_shape_ranges(humans)
    except DataError:
        ranges = default_shape_ranges()

    trajs, labels, attacks, directions = [], [], [], []
    chosen = rng.choice(len(humans), size=spec.n_human_like, replace=False)
    for i in chosen:
        tr = humans[int(i)]
        trajs.append(tr)
        labels.append(1)
        attacks.append("human")
        directions.append(tr.direction)

    from .synth import synth_trajectory  # local import avoids cycle at module load

    for tag in sorted(spec.attacks):
        count = spec.attacks[tag]
        if count == 0:
            continue
        if tag == "gan":
            for _ in range(count):
                noise = rng.standard_normal(gan_bundle.config.R)
                from .gan.model import generate
                tr = generate(gan_bundle, noise)
                trajs.append(tr)
                labels.append(0)
                attacks.append("gan")
                directions.append(None)
            continue
        shape_kind, vp_kind = split_attack_tag(tag)
        made = 0
        while made < count:
            template = humans[int(rng.integers(0, len(humans)))]
            direction = template.direction
            if stats is not None and direction in stats.stats:
                m = sample_point_count(stats, direction, rng)
            else:
                m = max(4, int(round(rng.normal(60, 15))))
            start, end = template.start, template.end
            span = abs(end[0] - start[0]) if abs(end[0] - start[0]) >= abs(end[1] - start[1]) \
                else abs(end[1] - start[1])
            if span < 1e-6:
                continue
            shape = sample_shape_spec(shape_kind, ranges, rng, span=span)
            try:
                tr = synth_trajectory(shape, VelocityKind(vp_kind), start, end, m,
                                      rate_hz=spec.rate_hz, direction=direction)
            except ConfigError:
                continue  # unfittable draw; resample parameters
            trajs.append(tr)
            labels.append(0)
            attacks.append(tag)
            directions.append(direction)
            made += 1

    ds = LabeledDataset(np.array(labels, dtype=int), attacks, directions,
                        trajectories=trajs)
    counts = ds.counts()
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "kind": "benchmark_manifest",
        "seed": spec.seed,
        "counts": counts,
        "total": len(ds),
    }
    return ds, manifest


def write_benchmark(out_dir, ds: LabeledDataset, manifest: dict) -> dict:
    """Write trajectories.jsonl + manifest.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_trajectories_jsonl(out / "trajectories.jsonl", ds)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return {"trajectories": str(out / "trajectories.jsonl"),
            "manifest": str(out / "manifest.json")}
