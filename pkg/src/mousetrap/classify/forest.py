"""Random forest of CART trees (Gini impurity), built from scratch.

Each tree is grown on a bootstrap sample with a fresh random feature subset
per split; the forest probability is the fraction of trees voting human.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError
from .dataset import LabeledDataset

__all__ = ["ForestConfig", "DecisionTree", "RandomForest"]


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    features_per_split: int | None = None  # default ceil(sqrt(d))
    seed: int = 0


def _best_split(X, y, feat_ids, min_leaf):
    """Exhaustive Gini-gain search over candidate features.

    Returns (feature, threshold, gain) or None when no split improves purity.
    """
    n = len(y)
    pos = int(np.sum(y))
    p1 = pos / n
    gini_parent = 1.0 - p1 * p1 - (1 - p1) * (1 - p1)
    best = None
    for f in feat_ids:
        vals = X[:, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        sy = y[order]
        cut = np.flatnonzero(sv[:-1] < sv[1:])  # split between distinct values
        if len(cut) == 0:
            continue
        n_left = cut + 1
        ok = (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not np.any(ok):
            continue
        n_left = n_left[ok]
        cut = cut[ok]
        pos_left = np.cumsum(sy)[cut]
        pos_right = pos - pos_left
        n_right = n - n_left
        pl = pos_left / n_left
        pr = pos_right / n_right
        gini_left = 1.0 - pl * pl - (1 - pl) * (1 - pl)
        gini_right = 1.0 - pr * pr - (1 - pr) * (1 - pr)
        gain = gini_parent - (n_left * gini_left + n_right * gini_right) / n
        k = int(np.argmax(gain))
        if gain[k] > 1e-12 and (best is None or gain[k] > best[2]):
            thr = 0.5 * (sv[cut[k]] + sv[cut[k] + 1])
            best = (int(f), float(thr), float(gain[k]))
    return best


class DecisionTree:
    """CART tree stored as flat arrays (feature, threshold, children, vote)."""

    def __init__(self, max_depth=None, min_leaf=1, features_per_split=None, rng=None):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.features_per_split = features_per_split
        self.rng = rng or np.random.default_rng()
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.vote: list[int] = []

    def _new_node(self):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.vote.append(1)
        return len(self.feature) - 1

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        d = X.shape[1]
        k = self.features_per_split or math.ceil(math.sqrt(d))
        k = min(k, d)
        stack = [(self._new_node(), np.arange(len(y)), 0)]
        while stack:
            node, idx, depth = stack.pop()
            ys = y[idx]
            pos = int(np.sum(ys))
            # majority vote; exact tie counts as human
            self.vote[node] = 1 if pos * 2 >= len(ys) else 0
            if (pos == 0 or pos == len(ys)
                    or len(ys) < 2 * self.min_leaf
                    or (self.max_depth is not None and depth >= self.max_depth)):
                continue
            feat_ids = np.sort(self.rng.choice(d, size=k, replace=False))
            split = _best_split(X[idx], ys, feat_ids, self.min_leaf)
            if split is None:
                continue
            f, thr, _ = split
            go_left = X[idx, f] <= thr
            self.feature[node] = f
            self.threshold[node] = thr
            l_node, r_node = self._new_node(), self._new_node()
            self.left[node] = l_node
            self.right[node] = r_node
            stack.append((l_node, idx[go_left], depth + 1))
            stack.append((r_node, idx[~go_left], depth + 1))
        self._freeze()
        return self

    def _freeze(self):
        self.feature = np.asarray(self.feature, dtype=int)
        self.threshold = np.asarray(self.threshold, dtype=float)
        self.left = np.asarray(self.left, dtype=int)
        self.right = np.asarray(self.right, dtype=int)
        self.vote = np.asarray(self.vote, dtype=int)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X), dtype=int)
        stack = [(0, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            if self.left[node] < 0:
                out[idx] = self.vote[node]
                continue
            go_left = X[idx, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], idx[go_left]))
            stack.append((self.right[node], idx[~go_left]))
        return out

    def as_dict(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "vote": self.vote.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        tree = cls()
        tree.feature = list(d["feature"])
        tree.threshold = list(d["threshold"])
        tree.left = list(d["left"])
        tree.right = list(d["right"])
        tree.vote = list(d["vote"])
        tree._freeze()
        return tree


class RandomForest:
    def __init__(self, cfg: ForestConfig | None = None):
        self.cfg = cfg or ForestConfig()
        if self.cfg.n_trees < 1:
            raise ConfigError("forest needs at least one tree")
        self.trees: list[DecisionTree] = []

    def fit(self, X, y) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if len(np.unique(y)) < 2:
            raise DataError("training set must contain both classes")
        self.trees = []
        seeds = np.random.SeedSequence(self.cfg.seed).spawn(self.cfg.n_trees)
        n = len(y)
        for seq in seeds:
            rng = np.random.default_rng(seq)
            boot = rng.integers(0, n, size=n)
            tree = DecisionTree(max_depth=self.cfg.max_depth,
                                min_leaf=self.cfg.min_leaf,
                                features_per_split=self.cfg.features_per_split,
                                rng=rng)
            tree.fit(X[boot], y[boot])
            self.trees.append(tree)
        return self

    @classmethod
    def train(cls, ds: LabeledDataset, cfg: ForestConfig | None = None) -> "RandomForest":
        model = cls(cfg)
        return model.fit(ds.X, ds.y)

    def predict_proba(self, X) -> np.ndarray:
        """Fraction of trees voting human."""
        if not self.trees:
            raise DataError("forest is not trained")
        votes = np.zeros(len(X))
        for tree in self.trees:
            votes += tree.predict(X)
        return votes / len(self.trees)

    def as_dict(self) -> dict:
        return {"n_trees": self.cfg.n_trees, "trees": [t.as_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForest":
        model = cls(ForestConfig(n_trees=d["n_trees"]))
        model.trees = [DecisionTree.from_dict(td) for td in d["trees"]]
        return model
