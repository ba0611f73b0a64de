"""Multi-layer perceptron with manual backprop, trained with Adam."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, NumericError
from ..optim import Adam

__all__ = ["MlpConfig", "Mlp"]


@dataclass(frozen=True)
class MlpConfig:
    hidden: tuple[int, ...] = (64,)
    lr: float = 1e-3
    epochs: int = 100
    batch: int = 32
    seed: int = 0


def _bce_from_logits(z: np.ndarray, y: np.ndarray) -> float:
    # log(1 + e^-|z|) + max(z, 0) - z*y, numerically stable
    return float(np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0) - z * y))


class Mlp:
    """ReLU hidden layers, sigmoid output, binary cross-entropy loss."""

    def __init__(self, n_features: int, cfg: MlpConfig | None = None):
        self.cfg = cfg or MlpConfig()
        self.sizes = (n_features, *self.cfg.hidden, 1)
        rng = np.random.default_rng(self.cfg.seed)
        self.params: dict[str, np.ndarray] = {}
        for i in range(len(self.sizes) - 1):
            fan_in, fan_out = self.sizes[i], self.sizes[i + 1]
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            self.params[f"W{i}"] = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            self.params[f"b{i}"] = np.zeros(fan_out)

    @property
    def n_layers(self) -> int:
        return len(self.sizes) - 1

    def _forward(self, X):
        acts = [np.asarray(X, dtype=float)]
        for i in range(self.n_layers):
            z = acts[-1] @ self.params[f"W{i}"].T + self.params[f"b{i}"]
            acts.append(np.maximum(z, 0.0) if i < self.n_layers - 1 else z)
        return acts

    def loss_and_grads(self, X, y):
        y = np.asarray(y, dtype=float)
        acts = self._forward(X)
        logits = acts[-1][:, 0]
        loss = _bce_from_logits(logits, y)
        n = len(y)
        delta = ((1.0 / (1.0 + np.exp(-logits)) - y) / n)[:, None]
        grads: dict[str, np.ndarray] = {}
        for i in range(self.n_layers - 1, -1, -1):
            grads[f"W{i}"] = delta.T @ acts[i]
            grads[f"b{i}"] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.params[f"W{i}"]) * (acts[i] > 0)
        return loss, grads

    def fit(self, X, y) -> "Mlp":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.shape[1] != self.sizes[0]:
            raise DataError(f"expected {self.sizes[0]} features, got {X.shape[1]}")
        rng = np.random.default_rng(self.cfg.seed + 1)
        opt = Adam(lr=self.cfg.lr)
        n = len(y)
        for epoch in range(self.cfg.epochs):
            order = rng.permutation(n)
            for lo in range(0, n, self.cfg.batch):
                idx = order[lo:lo + self.cfg.batch]
                loss, grads = self.loss_and_grads(X[idx], y[idx])
                if not np.isfinite(loss):
                    raise NumericError(
                        f"MLP loss became non-finite at epoch {epoch}, batch offset {lo}")
                opt.step(self.params, grads)
        return self

    def predict_proba(self, X) -> np.ndarray:
        logits = self._forward(X)[-1][:, 0]
        return 1.0 / (1.0 + np.exp(-logits))

    # flat parameter access for gradient checking
    def get_flat(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in sorted(self.params)])

    def set_flat(self, flat: np.ndarray) -> None:
        pos = 0
        for k in sorted(self.params):
            size = self.params[k].size
            self.params[k] = flat[pos:pos + size].reshape(self.params[k].shape).copy()
            pos += size

    def flat_grads(self, grads: dict) -> np.ndarray:
        return np.concatenate([grads[k].ravel() for k in sorted(grads)])

    def as_dict(self) -> dict:
        return {"sizes": list(self.sizes),
                "params": {k: v.tolist() for k, v in self.params.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "Mlp":
        sizes = d["sizes"]
        model = cls(sizes[0], MlpConfig(hidden=tuple(sizes[1:-1])))
        model.params = {k: np.asarray(v, dtype=float) for k, v in d["params"].items()}
        return model
