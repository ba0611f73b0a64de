"""Binary detection metrics; human is the positive class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError

__all__ = ["Metrics", "evaluate", "roc_auc", "threshold_metrics"]


@dataclass(frozen=True)
class Metrics:
    acc: float
    auc: float
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict[str, float]:
        return {"acc": self.acc, "auc": self.auc, "precision": self.precision,
                "recall": self.recall, "f1": self.f1}


def _as_arrays(scores, labels):
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    if s.shape != y.shape or s.ndim != 1:
        raise DataError("scores and labels must be 1-d arrays of equal length")
    return s, y


def threshold_metrics(scores, labels, threshold: float = 0.5):
    """(acc, precision, recall, f1) at a fixed decision threshold.

    Predictions are human when score >= threshold. Precision/recall are 0
    when their denominators are empty; f1 is 0 when precision + recall is.
    """
    s, y = _as_arrays(scores, labels)
    pred = (s >= threshold).astype(int)
    tp = int(np.sum((pred == 1) & (y == 1)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    acc = float(np.mean(pred == y))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return acc, precision, recall, f1


def roc_auc(scores, labels) -> float:
    """Trapezoidal area under the ROC curve; score ties contribute 1/2."""
    s, y = _as_arrays(scores, labels)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC undefined: both classes must be present")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    # cut the sweep at distinct score values so tie blocks form one segment
    distinct = np.concatenate([np.flatnonzero(np.diff(s_sorted)), [len(s_sorted) - 1]])
    tp = np.cumsum(y_sorted == 1)[distinct]
    fp = np.cumsum(y_sorted == 0)[distinct]
    tpr = np.concatenate([[0.0], tp / n_pos])
    fpr = np.concatenate([[0.0], fp / n_neg])
    return float(np.trapezoid(tpr, fpr))


def evaluate(scores, labels) -> Metrics:
    """All five metrics; raises when AUC is undefined (single-class input)."""
    acc, precision, recall, f1 = threshold_metrics(scores, labels)
    return Metrics(acc, roc_auc(scores, labels), precision, recall, f1)
