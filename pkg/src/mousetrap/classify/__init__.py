"""Human-vs-bot classifiers, metrics, and experiment protocols."""

from .dataset import LabeledDataset, standardize, apply_standardization
from .forest import ForestConfig, RandomForest
from .knn import KnnModel, OneClassKnn, knn_predict
from .metrics import Metrics, evaluate, roc_auc, threshold_metrics
from .mlp import Mlp, MlpConfig
from .protocol import (
    LearningCurveResult,
    ProtocolConfig,
    ProtocolResult,
    run_learning_curve,
    run_protocol,
    run_protocol_grouped,
    train_model,
)

__all__ = [
    "LabeledDataset", "standardize", "apply_standardization",
    "ForestConfig", "RandomForest",
    "KnnModel", "OneClassKnn", "knn_predict",
    "Metrics", "evaluate", "roc_auc", "threshold_metrics",
    "Mlp", "MlpConfig",
    "ProtocolConfig", "ProtocolResult", "LearningCurveResult",
    "run_protocol", "run_protocol_grouped", "run_learning_curve", "train_model",
]
