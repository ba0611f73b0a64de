"""Labeled datasets (feature rows or raw trajectories) and standardization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from ..trajectory import Trajectory

__all__ = ["LabeledDataset", "standardize", "apply_standardization"]

HUMAN, BOT = 1, 0


@dataclass
class LabeledDataset:
    """Rows of (features | trajectory, label, attack_type, direction).

    label: 1 = human, 0 = bot. Exactly one of `X` (feature matrix) or
    `trajectories` is set; `schema` names the feature layout when `X` is.
    """

    y: np.ndarray
    attack_types: list
    directions: list
    X: np.ndarray | None = None
    schema: str | None = None
    trajectories: list | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=int)
        if not np.all(np.isin(self.y, (0, 1))):
            raise DataError("labels must be binary (1 = human, 0 = bot)")
        n = len(self.y)
        if (self.X is None) == (self.trajectories is None):
            raise DataError("dataset holds either features or trajectories, not both")
        if self.X is not None:
            self.X = np.asarray(self.X, dtype=float)
            if self.X.ndim != 2 or len(self.X) != n:
                raise DataError("feature matrix shape does not match labels")
            if self.schema is None:
                raise DataError("feature dataset needs a schema name")
            from ..features import SCHEMAS
            if self.schema in SCHEMAS and self.X.shape[1] != len(SCHEMAS[self.schema]):
                raise DataError(
                    f"{self.schema} expects {len(SCHEMAS[self.schema])} columns, "
                    f"got {self.X.shape[1]}")
        else:
            if len(self.trajectories) != n:
                raise DataError("trajectory list length does not match labels")
        if len(self.attack_types) != n or len(self.directions) != n:
            raise DataError("attack_types/directions length does not match labels")

    @property
    def kind(self) -> str:
        return "features" if self.X is not None else "trajectories"

    def __len__(self) -> int:
        return len(self.y)

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx)
        return LabeledDataset(
            y=self.y[idx],
            attack_types=[self.attack_types[i] for i in idx],
            directions=[self.directions[i] for i in idx],
            X=self.X[idx] if self.X is not None else None,
            schema=self.schema,
            trajectories=[self.trajectories[i] for i in idx]
            if self.trajectories is not None else None,
        )

    def counts(self) -> dict:
        out: dict[str, int] = {}
        for tag in self.attack_types:
            out[tag] = out.get(tag, 0) + 1
        return out


def standardize(train: LabeledDataset, apply_to: LabeledDataset):
    """Z-score both datasets using the training statistics only.

    Returns (train_std, apply_std, mean, std). Std uses the n-1 estimator;
    constant columns (std = 0) pass through unscaled.
    """
    if train.kind != "features" or apply_to.kind != "features":
        raise DataError("standardize operates on feature datasets")
    if train.schema != apply_to.schema:
        raise DataError(f"schema mismatch: {train.schema} vs {apply_to.schema}")
    if len(train) == 0:
        raise DataError("empty training set")
    mean = np.mean(train.X, axis=0)
    std = np.std(train.X, axis=0, ddof=1) if len(train) > 1 else np.zeros(train.X.shape[1])
    train_s = LabeledDataset(train.y, train.attack_types, train.directions,
                             X=apply_standardization(train.X, mean, std),
                             schema=train.schema)
    apply_s = LabeledDataset(apply_to.y, apply_to.attack_types, apply_to.directions,
                             X=apply_standardization(apply_to.X, mean, std),
                             schema=apply_to.schema)
    return train_s, apply_s, mean, std


def apply_standardization(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    out = X.copy()
    scale = std > 0
    out[:, scale] = (X[:, scale] - mean[scale]) / std[scale]
    return out
