"""Versioned model containers shared by the CLI and the HTTP service.

A saved model is a single JSON file:
  {"schema_version": 1, "kind": "model", "model": <rf|knn|mlp|oneclass|rnn>,
   "feature_schema": ..., "standardization": {"mean": [...], "std": [...]},
   "rate_hz": ..., "payload": {...}}

Feature models standardize inputs with the stored training statistics; the
rnn model consumes raw trajectories.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .classify.dataset import LabeledDataset, apply_standardization, standardize
from .classify.forest import RandomForest
from .classify.knn import KnnModel, OneClassKnn
from .classify.mlp import Mlp
from .errors import ConfigError, DataError
from .gan.train import RnnDetector

__all__ = ["TrainedModel", "save_model", "load_model", "train_full_model",
           "file_digest"]

_PAYLOADS = {
    "rf": RandomForest,
    "knn": KnnModel,
    "mlp": Mlp,
    "oneclass": OneClassKnn,
    "rnn": RnnDetector,
}


@dataclass
class TrainedModel:
    kind: str
    payload: object
    feature_schema: str | None = None
    mean: np.ndarray | None = None
    std: np.ndarray | None = None
    rate_hz: float = 200.0
    version: str | None = None

    def predict_proba(self, X=None, trajectories=None) -> np.ndarray:
        if self.kind == "rnn":
            if trajectories is None:
                raise DataError("rnn model needs raw trajectories")
            return self.payload.predict_proba(trajectories)
        if X is None:
            raise DataError(f"{self.kind} model needs feature rows")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.mean is not None:
            X = apply_standardization(X, self.mean, self.std)
        return self.payload.predict_proba(X)


def train_full_model(kind: str, ds: LabeledDataset, seed: int = 0,
                     model_cfg=None, rate_hz: float = 200.0) -> TrainedModel:
    """Train on the complete dataset (for shipping a serving model)."""
    from .classify.protocol import train_model

    if kind == "rnn":
        payload = train_model(kind, ds, seed, model_cfg)
        return TrainedModel(kind, payload, rate_hz=rate_hz)
    train_s, _, mean, std = standardize(ds, ds)
    payload = train_model(kind, train_s, seed, model_cfg)
    return TrainedModel(kind, payload, feature_schema=ds.schema,
                        mean=mean, std=std, rate_hz=rate_hz)


def save_model(path, model: TrainedModel) -> None:
    if model.kind not in _PAYLOADS:
        raise ConfigError(f"unknown model kind {model.kind!r}")
    doc = {
        "schema_version": 1,
        "kind": "model",
        "model": model.kind,
        "feature_schema": model.feature_schema,
        "rate_hz": model.rate_hz,
        "standardization": None if model.mean is None else {
            "mean": model.mean.tolist(), "std": model.std.tolist()},
        "payload": model.payload.as_dict(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("kind") != "model" or doc.get("schema_version") != 1:
        raise DataError(f"{path}: not a version-1 model container")
    kind = doc.get("model")
    if kind not in _PAYLOADS:
        raise DataError(f"{path}: unknown model kind {kind!r}")
    payload = _PAYLOADS[kind].from_dict(doc["payload"])
    stats = doc.get("standardization")
    mean = np.asarray(stats["mean"], dtype=float) if stats else None
    std = np.asarray(stats["std"], dtype=float) if stats else None
    return TrainedModel(kind, payload, feature_schema=doc.get("feature_schema"),
                        mean=mean, std=std, rate_hz=float(doc.get("rate_hz", 200.0)),
                        version=file_digest(path))


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()[:16]
