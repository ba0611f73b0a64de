"""Mouse-dynamics bot detection toolkit.

Pipeline: trajectories -> velocity profiles -> lognormal stroke
decomposition -> fixed-size feature vectors -> human-vs-bot classifiers,
plus two synthetic trajectory generators (function-based and adversarial)
for building training corpora and probing detectors.
"""

from .errors import ConfigError, DataError, MousetrapError, NumericError
from .features import FeatureVector, combined_features, global_features, neuromotor_features
from .lognormal import (
    Decomposition,
    FitConfig,
    LognormalStroke,
    decompose,
    decompose_trajectory,
    reconstruct,
    snr,
    stroke_angles,
    stroke_velocity,
)
from .trajectory import (
    PathStats,
    Trajectory,
    VelocityProfile,
    path_stats,
    resample,
    resample_count,
    velocity_profile,
)

__version__ = "0.1.0"

__all__ = [
    "MousetrapError", "ConfigError", "DataError", "NumericError",
    "Trajectory", "VelocityProfile", "PathStats",
    "velocity_profile", "resample", "resample_count", "path_stats",
    "LognormalStroke", "FitConfig", "Decomposition",
    "stroke_velocity", "reconstruct", "snr", "decompose",
    "decompose_trajectory", "stroke_angles",
    "FeatureVector", "neuromotor_features", "global_features", "combined_features",
    "__version__",
]
