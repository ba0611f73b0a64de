"""K-nearest-neighbors voting and the kNN-novelty one-class baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError

__all__ = ["knn_predict", "KnnModel", "OneClassKnn"]


def _sq_distances(train_X: np.ndarray, x: np.ndarray) -> np.ndarray:
    diff = train_X - x
    return np.einsum("ij,ij->i", diff, diff)


def _k_nearest(train_X: np.ndarray, x: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest rows; exact distance ties favor lower index."""
    d = _sq_distances(train_X, x)
    return np.argsort(d, kind="stable")[:k]


def knn_predict(train_X, train_y, X, k: int = 10) -> np.ndarray:
    """Fraction of human labels among the k Euclidean-nearest neighbors."""
    if k <= 0:
        raise ConfigError(f"k must be positive, got {k}")
    train_X = np.asarray(train_X, dtype=float)
    train_y = np.asarray(train_y, dtype=int)
    if len(train_X) < k:
        raise DataError(f"need at least k={k} training rows, got {len(train_X)}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.empty(len(X))
    for i, x in enumerate(X):
        out[i] = float(np.mean(train_y[_k_nearest(train_X, x, k)]))
    return out


@dataclass
class KnnModel:
    """Stored training matrix for protocol/service use."""

    X: np.ndarray
    y: np.ndarray
    k: int = 10

    def predict_proba(self, X) -> np.ndarray:
        return knn_predict(self.X, self.y, X, self.k)

    def as_dict(self) -> dict:
        return {"k": self.k, "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "KnnModel":
        return cls(np.asarray(d["X"], dtype=float), np.asarray(d["y"], dtype=int), int(d["k"]))


class OneClassKnn:
    """Novelty detector trained on human rows only.

    The novelty score of a sample is its mean distance to the k nearest
    training humans; the decision threshold is the q-quantile of
    leave-one-out scores on the training set. Scores above it mean bot.
    """

    def __init__(self, k: int = 10, quantile: float = 0.95):
        if k <= 0:
            raise ConfigError("k must be positive")
        if not 0 < quantile < 1:
            raise ConfigError("quantile must lie in (0, 1)")
        self.k = k
        self.quantile = quantile
        self.X: np.ndarray | None = None
        self.threshold: float | None = None

    def fit(self, X_humans, y=None) -> "OneClassKnn":
        if y is not None and not np.all(np.asarray(y) == 1):
            raise DataError("one-class baseline trains on human rows only")
        X = np.asarray(X_humans, dtype=float)
        if len(X) <= self.k:
            raise DataError(f"need more than k={self.k} training humans, got {len(X)}")
        loo = np.empty(len(X))
        for i, x in enumerate(X):
            d = np.sqrt(_sq_distances(X, x))
            d[i] = np.inf  # leave self out
            loo[i] = float(np.mean(np.sort(d, kind="stable")[:self.k]))
        self.X = X
        self.threshold = float(np.quantile(loo, self.quantile))
        return self

    def score(self, X) -> np.ndarray:
        """Novelty score: mean distance to the k nearest training humans."""
        if self.X is None:
            raise DataError("one-class model is not trained")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(len(X))
        for i, x in enumerate(X):
            d = np.sqrt(_sq_distances(self.X, x))
            out[i] = float(np.mean(np.sort(d, kind="stable")[:self.k]))
        return out

    def predict_proba(self, X) -> np.ndarray:
        """Monotone map of novelty to a pseudo-probability of human:
        threshold / (threshold + score), i.e. exactly 0.5 at the threshold."""
        s = self.score(X)
        thr = self.threshold
        if thr <= 0:
            return (s == 0).astype(float)
        return thr / (thr + s)

    def predict_bot(self, X) -> np.ndarray:
        return self.score(X) > self.threshold

    def as_dict(self) -> dict:
        return {"k": self.k, "quantile": self.quantile,
                "threshold": self.threshold, "X": self.X.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "OneClassKnn":
        model = cls(int(d["k"]), float(d["quantile"]))
        model.X = np.asarray(d["X"], dtype=float)
        model.threshold = float(d["threshold"])
        return model
