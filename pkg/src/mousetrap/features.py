"""Fixed-size feature vectors for one trajectory.

Three schemas: the 37-dim neuromotor set (per-stroke-parameter max/min/mean
over each temporal half of the movement, plus the stroke count), the 6-dim
global baseline (duration, distance, displacement, average angle, average
velocity, move efficiency), and their 43-dim concatenation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .lognormal import Decomposition, FitConfig, decompose_trajectory
from .trajectory import Trajectory, path_stats

__all__ = [
    "SCHEMAS",
    "FeatureVector",
    "neuromotor_features",
    "global_features",
    "combined_features",
    "featurize",
    "EFFICIENCY_CAP",
]

_STROKE_PARAMS = ("D", "t0", "mu", "sigma", "theta_s", "theta_e")
_STATS = ("max", "min", "mean")

NEUROMOTOR_NAMES = tuple(
    f"{half}_{param}_{stat}"
    for half in ("h1", "h2")
    for param in _STROKE_PARAMS
    for stat in _STATS
) + ("n_strokes",)

GLOBAL_NAMES = ("duration", "path_length", "displacement",
                "mean_angle", "mean_speed", "efficiency")

SCHEMAS: dict[str, tuple[str, ...]] = {
    "neuromotor37": NEUROMOTOR_NAMES,
    "global6": GLOBAL_NAMES,
    "combined43": NEUROMOTOR_NAMES + GLOBAL_NAMES,
}

EFFICIENCY_CAP = 1e6


@dataclass(frozen=True)
class FeatureVector:
    schema: str
    values: np.ndarray

    def __post_init__(self):
        if self.schema not in SCHEMAS:
            raise ConfigError(f"unknown feature schema {self.schema!r}")
        vals = np.asarray(self.values, dtype=float)
        expected = len(SCHEMAS[self.schema])
        if vals.shape != (expected,):
            raise DataError(f"{self.schema} expects {expected} values, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DataError("feature vector contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def names(self) -> tuple[str, ...]:
        return SCHEMAS[self.schema]

    def as_dict(self) -> dict[str, float]:
        return {name: float(v) for name, v in zip(self.names, self.values)}


def neuromotor_features(dec: Decomposition, traj: Trajectory) -> FeatureVector:
    """37 values: (max, min, mean) of each stroke parameter over each half
    of the movement (strokes assigned by peak time), then the stroke count.
    A half with no strokes contributes zeros."""
    mid = traj.duration / 2.0
    halves = ([], [])
    for s in dec.strokes:
        halves[0 if s.peak_time < mid else 1].append(s)
    out = []
    for strokes in halves:
        # canonical order keeps the stats bit-identical under permutation
        strokes = sorted(strokes, key=lambda s: (s.peak_time, s.D, s.t0, s.mu, s.sigma))
        if strokes:
            table = np.array([[s.D, s.t0, s.mu, s.sigma, s.theta_s, s.theta_e]
                              for s in strokes])
            for col in range(len(_STROKE_PARAMS)):
                vals = table[:, col]
                out.extend((float(np.max(vals)), float(np.min(vals)), float(np.mean(vals))))
        else:
            out.extend([0.0] * (len(_STROKE_PARAMS) * len(_STATS)))
    out.append(float(dec.n))
    return FeatureVector("neuromotor37", np.array(out))


def global_features(traj: Trajectory) -> FeatureVector:
    """Six coarse descriptors; efficiency = distance / displacement, capped
    when the movement returns to its start."""
    st = path_stats(traj)
    eff = st.path_length / st.displacement if st.displacement > 0 else EFFICIENCY_CAP
    eff = min(eff, EFFICIENCY_CAP)
    return FeatureVector("global6", np.array([
        st.duration, st.path_length, st.displacement,
        st.mean_angle, st.mean_speed, eff,
    ]))


def combined_features(traj: Trajectory, dec: Decomposition) -> FeatureVector:
    values = np.concatenate([
        neuromotor_features(dec, traj).values,
        global_features(traj).values,
    ])
    return FeatureVector("combined43", values)


def _featurize_one(args):
    traj, schema, cfg = args
    if schema == "global6":
        return global_features(traj).values
    dec = decompose_trajectory(traj, cfg)
    if schema == "neuromotor37":
        return neuromotor_features(dec, traj).values
    return combined_features(traj, dec).values


def featurize(trajs, schema: str, cfg: FitConfig | None = None,
              processes: int | None = None) -> np.ndarray:
    """Feature matrix (n, d) for a batch of trajectories.

    Decomposition dominates the cost; with processes > 1 the batch is fanned
    out over worker processes (each trajectory is independent).
    """
    if schema not in SCHEMAS:
        raise ConfigError(f"unknown feature schema {schema!r}")
    trajs = list(trajs)
    jobs = [(tr, schema, cfg) for tr in trajs]
    if processes and processes > 1 and len(trajs) > 8:
        import concurrent.futures
        with concurrent.futures.ProcessPoolExecutor(max_workers=processes) as ex:
            rows = list(ex.map(_featurize_one, jobs, chunksize=max(1, len(jobs) // (4 * processes))))
    else:
        rows = [_featurize_one(job) for job in jobs]
    return np.array(rows)
