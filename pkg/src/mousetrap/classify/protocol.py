"""Experiment protocols: stratified 70/30 repeats and learning curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError
from .dataset import LabeledDataset, apply_standardization, standardize
from .forest import ForestConfig, RandomForest
from .knn import KnnModel, OneClassKnn
from .metrics import Metrics, evaluate
from .mlp import Mlp, MlpConfig

__all__ = [
    "MODEL_KINDS",
    "ProtocolConfig",
    "ProtocolResult",
    "LearningCurveResult",
    "stratified_split",
    "train_model",
    "run_protocol",
    "run_protocol_grouped",
    "run_learning_curve",
]

MODEL_KINDS = ("rf", "knn", "mlp", "oneclass", "rnn")


@dataclass(frozen=True)
class ProtocolConfig:
    train_frac: float = 0.7
    repeats: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_frac < 1:
            raise ConfigError("train_frac must lie in (0, 1)")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")


@dataclass(frozen=True)
class ProtocolResult:
    mean: Metrics
    std: Metrics
    per_repeat: tuple[Metrics, ...]

    def as_dict(self) -> dict:
        return {"mean": self.mean.as_dict(), "std": self.std.as_dict(),
                "per_repeat": [m.as_dict() for m in self.per_repeat]}


@dataclass(frozen=True)
class LearningCurveResult:
    """Mean accuracy per (model kind, training-set size L)."""

    acc: dict
    trend_ok: dict

    def as_dict(self) -> dict:
        return {"acc": {k: {str(l): v for l, v in d.items()} for k, d in self.acc.items()},
                "trend_ok": dict(self.trend_ok)}


def stratified_split(y: np.ndarray, train_frac: float, rng: np.random.Generator):
    """Per-class shuffled split preserving the class ratio within one sample."""
    train, test = [], []
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        if len(idx) == 0:
            raise DataError("both classes must be present for a stratified split")
        perm = rng.permutation(idx)
        n_train = int(round(train_frac * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        train.append(perm[:n_train])
        test.append(perm[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


class _FeaturePredictor:
    """Standardize-with-train-stats then predict; shared by all feature models."""

    def __init__(self, model, mean, std):
        self.model = model
        self.mean = mean
        self.std = std

    def predict_proba(self, X):
        return self.model.predict_proba(apply_standardization(X, self.mean, self.std))


def train_model(kind: str, train: LabeledDataset, seed: int, model_cfg=None):
    """Train one detector on an already-standardized (or raw) training split."""
    if kind == "rf":
        cfg = model_cfg or ForestConfig()
        return RandomForest(ForestConfig(n_trees=cfg.n_trees, max_depth=cfg.max_depth,
                                         min_leaf=cfg.min_leaf,
                                         features_per_split=cfg.features_per_split,
                                         seed=seed)).fit(train.X, train.y)
    if kind == "knn":
        if isinstance(model_cfg, dict):
            k = int(model_cfg.get("k", 10))
        else:
            k = getattr(model_cfg, "k", 10)
        return KnnModel(train.X, train.y, k=k)
    if kind == "mlp":
        cfg = model_cfg or MlpConfig()
        cfg = MlpConfig(hidden=cfg.hidden, lr=cfg.lr, epochs=cfg.epochs,
                        batch=cfg.batch, seed=seed)
        return Mlp(train.X.shape[1], cfg).fit(train.X, train.y)
    if kind == "oneclass":
        humans = train.X[train.y == 1]
        if isinstance(model_cfg, dict):
            oc = OneClassKnn(model_cfg.get("k", 10), model_cfg.get("quantile", 0.95))
        else:
            oc = model_cfg or OneClassKnn()
        return oc.fit(humans)
    if kind == "rnn":
        from ..gan.train import RnnDetectorConfig, train_recurrent_detector
        cfg = model_cfg or RnnDetectorConfig()
        cfg = RnnDetectorConfig(units=cfg.units, M=cfg.M, lr=cfg.lr,
                                epochs=cfg.epochs, batch=cfg.batch, seed=seed)
        return train_recurrent_detector(train.trajectories, train.y, cfg)
    raise ConfigError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


def _fit_and_score(ds, kind, train_idx, test_idx, seed, model_cfg):
    train, test = ds.subset(train_idx), ds.subset(test_idx)
    if kind == "rnn":
        if ds.kind != "trajectories":
            raise DataError("rnn protocol needs a raw-trajectory dataset")
        model = train_model(kind, train, seed, model_cfg)
        scores = model.predict_proba(test.trajectories)
    else:
        if ds.kind != "features":
            raise DataError(f"{kind} protocol needs a feature dataset")
        train_s, test_s, mean, std = standardize(train, test)
        model = train_model(kind, train_s, seed, model_cfg)
        scores = model.predict_proba(test_s.X)
    return evaluate(scores, test.y)


def _repeat_seeds(cfg: ProtocolConfig):
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.repeats)
    out = []
    for child in children:
        split_seq, model_seq = child.spawn(2)
        out.append((np.random.default_rng(split_seq),
                    int(model_seq.generate_state(1)[0] % (2**31))))
    return out


def _aggregate(per_repeat) -> ProtocolResult:
    arr = np.array([[m.acc, m.auc, m.precision, m.recall, m.f1] for m in per_repeat])
    mean = Metrics(*[float(v) for v in arr.mean(axis=0)])
    std = Metrics(*[float(v) for v in arr.std(axis=0)])  # ddof=0: repeats=1 -> 0
    return ProtocolResult(mean, std, tuple(per_repeat))


def run_protocol(ds: LabeledDataset, model_kind: str,
                 cfg: ProtocolConfig | None = None, model_cfg=None) -> ProtocolResult:
    """Stratified random train/test repeats; mean and std of all metrics."""
    cfg = cfg or ProtocolConfig()
    per_repeat = []
    for rng, model_seed in _repeat_seeds(cfg):
        train_idx, test_idx = stratified_split(ds.y, cfg.train_frac, rng)
        per_repeat.append(_fit_and_score(ds, model_kind, train_idx, test_idx,
                                         model_seed, model_cfg))
    return _aggregate(per_repeat)


def run_protocol_grouped(ds: LabeledDataset, model_kind: str,
                         cfg: ProtocolConfig | None = None, by: str = "attack",
                         model_cfg=None) -> dict:
    """One protocol run per group: direction tags, or one per attack type
    (each attack evaluated against all humans)."""
    cfg = cfg or ProtocolConfig()
    groups: dict[str, ProtocolResult] = {}
    if by == "direction":
        tags = sorted({d for d in ds.directions if d is not None})
        if not tags:
            raise DataError("dataset has no direction tags")
        for tag in tags:
            idx = [i for i, d in enumerate(ds.directions) if d == tag]
            groups[tag] = run_protocol(ds.subset(idx), model_kind, cfg, model_cfg)
    elif by == "attack":
        tags = sorted({a for a in ds.attack_types if a != "human"})
        if not tags:
            raise DataError("dataset has no bot rows")
        human_idx = [i for i, a in enumerate(ds.attack_types) if a == "human"]
        for tag in tags:
            idx = human_idx + [i for i, a in enumerate(ds.attack_types) if a == tag]
            groups[tag] = run_protocol(ds.subset(sorted(idx)), model_kind, cfg, model_cfg)
    else:
        raise ConfigError("grouping must be 'direction' or 'attack'")
    return groups


def run_learning_curve(ds: LabeledDataset, model_kinds, l_values,
                       cfg: ProtocolConfig | None = None,
                       model_cfgs: dict | None = None) -> LearningCurveResult:
    """Accuracy against training-set size L, with L/2 samples per class.

    Uses the same split stream as run_protocol; when L equals the full
    training-split size the subset step is skipped, so results coincide with
    run_protocol for the same seed.
    """
    cfg = cfg or ProtocolConfig()
    model_cfgs = model_cfgs or {}
    l_values = sorted(int(l) for l in l_values)
    n_train_total = int(round(cfg.train_frac * len(ds)))
    for l in l_values:
        if l % 2 != 0:
            raise ConfigError(f"L must be even to balance classes, got {l}")
        if l > n_train_total:
            raise ConfigError(f"L={l} exceeds the training split of {n_train_total}")
    acc: dict[str, dict[int, float]] = {k: {l: [] for l in l_values} for k in model_kinds}
    for rng, model_seed in _repeat_seeds(cfg):
        train_idx, test_idx = stratified_split(ds.y, cfg.train_frac, rng)
        for l in l_values:
            if l == len(train_idx):
                sub = train_idx
            else:
                half = l // 2
                sub = []
                for cls in (0, 1):
                    pool = train_idx[ds.y[train_idx] == cls]
                    if len(pool) < half:
                        raise DataError(f"not enough class-{cls} rows for L={l}")
                    sub.append(rng.permutation(pool)[:half])
                sub = np.sort(np.concatenate(sub))
            for kind in model_kinds:
                m = _fit_and_score(ds, kind, sub, test_idx, model_seed,
                                   model_cfgs.get(kind))
                acc[kind][l].append(m.acc)
    mean_acc = {k: {l: float(np.mean(v)) for l, v in d.items()} for k, d in acc.items()}
    trend_ok = {k: mean_acc[k][l_values[-1]] >= mean_acc[k][l_values[0]] - 0.02
                for k in model_kinds}
    return LearningCurveResult(mean_acc, trend_ok)
