"""HTTP classification and synthesis service backing the web demo.

Endpoints:
  POST /v1/classify     trajectory points -> verdict + decomposition + features
  GET  /v1/synth        one synthetic trajectory of a given attack type
  GET  /v1/synth/types  the closed set of attack tags
  GET  /healthz         status, model version, uptime

Handlers are stateless over an immutable model snapshot; swapping the
snapshot replaces it atomically between requests.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .classify.dataset import LabeledDataset
from .errors import DataError, MousetrapError
from .features import SCHEMAS, combined_features, global_features, neuromotor_features
from .gan.model import GanBundle, generate
from .lognormal import decompose_trajectory
from .modelstore import TrainedModel, load_model
from .surrogate import segment_endpoints
from .synth import (
    ATTACK_TAGS,
    DIRECTIONS,
    VelocityKind,
    default_shape_ranges,
    sample_shape_spec,
    split_attack_tag,
    synth_trajectory,
)
from .trajectory import Trajectory, resample

__all__ = ["create_app"]


class ClassifyRequest(BaseModel):
    points: list[list[float]]
    feature_set: str | None = None


@dataclass
class _Snapshot:
    model: TrainedModel | None = None
    gan: GanBundle | None = None


def _trajectory_from_points(points) -> Trajectory:
    if len(points) < 4:
        raise HTTPException(status_code=400, detail="need at least 4 points")
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise HTTPException(status_code=400, detail="points must be [x, y, t_ms] triples")
    if not np.all(np.isfinite(arr)):
        raise HTTPException(status_code=400, detail="points contain non-finite values")
    t = arr[:, 2]
    if np.any(np.diff(t) <= 0):
        raise HTTPException(status_code=422, detail="timestamps must be strictly increasing")
    return Trajectory(arr[:, 0], arr[:, 1], (t - t[0]) / 1000.0)


def _synth_by_tag(tag: str, seed: int, snapshot: _Snapshot) -> Trajectory:
    rng = np.random.default_rng(seed)
    if tag == "gan":
        if snapshot.gan is None:
            raise HTTPException(status_code=503, detail="gan bundle not loaded")
        return generate(snapshot.gan, rng.standard_normal(snapshot.gan.config.R))
    shape_kind, vp_kind = split_attack_tag(tag)
    direction = DIRECTIONS[int(rng.integers(0, len(DIRECTIONS)))]
    start, end = segment_endpoints(direction)
    start = (start[0] + rng.uniform(-8, 8), start[1] + rng.uniform(-8, 8))
    end = (end[0] + rng.uniform(-8, 8), end[1] + rng.uniform(-8, 8))
    m = max(4, int(round(rng.normal(60, 12))))
    span = max(abs(end[0] - start[0]), abs(end[1] - start[1]))
    ranges = default_shape_ranges()
    for _ in range(16):
        shape = sample_shape_spec(shape_kind, ranges, rng, span=span)
        try:
            return synth_trajectory(shape, VelocityKind(vp_kind), start, end, m,
                                    direction=direction)
        except MousetrapError:
            continue
    raise HTTPException(status_code=500, detail="could not synthesize trajectory")


def _warm_up() -> None:
    """Run one tiny decomposition so JIT kernels are loaded before the first
    request (cold-start otherwise dominates its latency)."""
    t = np.arange(24) / 200.0
    tr = Trajectory(np.linspace(0, 50, 24), np.linspace(0, 20, 24) ** 1.2, t)
    decompose_trajectory(tr)


def create_app(model_path=None, gan_path=None, cors_origin: str = "*") -> FastAPI:
    app = FastAPI(title="mousetrap", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    snapshot = _Snapshot()
    if model_path:
        snapshot.model = load_model(model_path)
    if gan_path:
        with open(gan_path) as fh:
            snapshot.gan = GanBundle.from_dict(json.load(fh))
    app.state.snapshot = snapshot
    app.state.started = time.monotonic()
    _warm_up()

    @app.get("/healthz")
    def healthz():
        snap: _Snapshot = app.state.snapshot
        return {
            "status": "ok" if snap.model is not None else "degraded",
            "model_version": snap.model.version if snap.model else None,
            "uptime_s": time.monotonic() - app.state.started,
        }

    @app.get("/v1/synth/types")
    def synth_types():
        return {"types": list(ATTACK_TAGS)}

    @app.get("/v1/synth")
    def synth(type: str, seed: int = 0):
        if type not in ATTACK_TAGS:
            raise HTTPException(status_code=404, detail=f"unknown attack tag {type!r}")
        tr = _synth_by_tag(type, seed, app.state.snapshot)
        points = [[float(x), float(y), int(round(t * 1000.0))]
                  for x, y, t in zip(tr.x, tr.y, tr.t)]
        return {"type": type, "seed": seed, "points": points}

    @app.post("/v1/classify")
    def classify(req: ClassifyRequest):
        snap: _Snapshot = app.state.snapshot
        if snap.model is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        model = snap.model
        schema = model.feature_schema or "combined43"
        if req.feature_set is not None and req.feature_set != schema:
            raise HTTPException(status_code=400,
                                detail=f"model serves feature_set {schema!r}")
        started = time.perf_counter()
        traj = _trajectory_from_points(req.points)
        try:
            conditioned = resample(traj, model.rate_hz)
            dec = decompose_trajectory(conditioned)
            if model.kind == "rnn":
                score = float(model.predict_proba(trajectories=[conditioned])[0])
                feats = combined_features(conditioned, dec)
            else:
                if schema == "neuromotor37":
                    feats = neuromotor_features(dec, conditioned)
                elif schema == "global6":
                    feats = global_features(conditioned)
                else:
                    feats = combined_features(conditioned, dec)
                score = float(model.predict_proba(X=feats.values[None, :])[0])
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {
            "label": "human" if score >= 0.5 else "bot",
            "score": score,
            "n_lognormals": dec.n,
            "features": feats.as_dict(),
            "decomposition": [s.as_dict() for s in dec.strokes],
            "latency_ms": (time.perf_counter() - started) * 1000.0,
        }

    return app
