"""Canonical trajectory representation, velocity profiles, and basic geometry.

A trajectory is a timestamped pointer path between two clicks. Coordinates
are pixels and time is seconds everywhere inside the package; milliseconds
exist only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "Trajectory",
    "VelocityProfile",
    "PathStats",
    "velocity_profile",
    "resample",
    "resample_count",
    "path_stats",
]


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Trajectory:
    """Ordered (x, y, t) samples with t re-based so the first sample is 0 s.

    Invariants enforced at construction: length >= 2, finite coordinates,
    strictly increasing timestamps.
    """

    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    direction: str | None = None
    source: str | None = None

    def __post_init__(self):
        x, y, t = _readonly(self.x), _readonly(self.y), _readonly(self.t)
        if not (x.shape == y.shape == t.shape) or x.ndim != 1:
            raise DataError("x, y, t must be 1-d arrays of equal length")
        if len(x) < 2:
            raise DataError(f"trajectory needs >= 2 points, got {len(x)}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(t))):
            raise DataError("trajectory contains non-finite values")
        if np.any(np.diff(t) <= 0):
            raise DataError("timestamps must be strictly increasing")
        if t[0] != 0.0:
            t = _readonly(t - t[0])
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t)

    @classmethod
    def from_points(cls, points, direction=None, source=None) -> "Trajectory":
        """Build from an (M, 3) array-like of rows (x, y, t_seconds)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise DataError("points must be an (M, 3) array of (x, y, t)")
        return cls(pts[:, 0], pts[:, 1], pts[:, 2], direction=direction, source=source)

    @property
    def n_points(self) -> int:
        return len(self.x)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def start(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.y[0])

    @property
    def end(self) -> tuple[float, float]:
        return float(self.x[-1]), float(self.y[-1])

    def points(self) -> np.ndarray:
        """Return an (M, 3) copy of (x, y, t) rows."""
        return np.column_stack([self.x, self.y, self.t])

    def replace_meta(self, direction=None, source=None) -> "Trajectory":
        return Trajectory(
            self.x, self.y, self.t,
            direction=direction if direction is not None else self.direction,
            source=source if source is not None else self.source,
        )


@dataclass(frozen=True)
class VelocityProfile:
    """Scalar speed samples (t, v) on the source trajectory's time base."""

    t: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        t, v = _readonly(self.t), _readonly(self.v)
        if t.shape != v.shape or t.ndim != 1:
            raise DataError("velocity profile t and v must be 1-d arrays of equal length")
        if np.any(v < 0):
            raise DataError("speed must be non-negative")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    def __len__(self) -> int:
        return len(self.t)


class PathStats(NamedTuple):
    duration: float
    path_length: float
    displacement: float
    mean_angle: float
    mean_speed: float


def velocity_profile(traj: Trajectory) -> VelocityProfile:
    """Finite-difference speed of each segment, assigned to its midpoint time."""
    dt = np.diff(traj.t)
    if np.any(dt <= 0):
        raise DataError("duplicate or non-increasing timestamps")
    dist = np.hypot(np.diff(traj.x), np.diff(traj.y))
    mid = (traj.t[:-1] + traj.t[1:]) / 2.0
    return VelocityProfile(mid, dist / dt)


def resample(traj: Trajectory, rate_hz: float) -> Trajectory:
    """Linear interpolation onto a uniform grid of spacing 1/rate_hz.

    The grid covers [t1, tM]; both endpoints are kept exactly and no sample
    falls outside the original time span.
    """
    if rate_hz <= 0:
        raise ConfigError(f"rate_hz must be positive, got {rate_hz}")
    if traj.duration <= 0:
        raise DataError("cannot resample a zero-duration trajectory")
    step = 1.0 / rate_hz
    n_steps = int(math.floor(traj.duration / step + 1e-9))
    grid = traj.t[0] + step * np.arange(n_steps + 1)
    if traj.t[-1] - grid[-1] > step * 1e-9:
        grid = np.append(grid, traj.t[-1])
    else:
        grid[-1] = traj.t[-1]
    x = np.interp(grid, traj.t, traj.x)
    y = np.interp(grid, traj.t, traj.y)
    x[0], y[0] = traj.x[0], traj.y[0]
    x[-1], y[-1] = traj.x[-1], traj.y[-1]
    return Trajectory(x, y, grid, direction=traj.direction, source=traj.source)


def resample_count(traj: Trajectory, m: int) -> Trajectory:
    """Linear interpolation onto exactly m uniformly spaced samples."""
    if m < 2:
        raise ConfigError(f"resample_count needs m >= 2, got {m}")
    grid = np.linspace(traj.t[0], traj.t[-1], m)
    x = np.interp(grid, traj.t, traj.x)
    y = np.interp(grid, traj.t, traj.y)
    x[0], y[0] = traj.x[0], traj.y[0]
    x[-1], y[-1] = traj.x[-1], traj.y[-1]
    return Trajectory(x, y, grid, direction=traj.direction, source=traj.source)


def path_stats(traj: Trajectory) -> PathStats:
    """Duration, arc length, net displacement, mean segment angle, mean speed."""
    duration = traj.duration
    if duration <= 0:
        raise DataError("zero-duration trajectory")
    dx = np.diff(traj.x)
    dy = np.diff(traj.y)
    seg = np.hypot(dx, dy)
    path_length = float(np.sum(seg))
    displacement = float(math.hypot(traj.x[-1] - traj.x[0], traj.y[-1] - traj.y[0]))
    mean_angle = float(np.mean(np.arctan2(dy, dx)))
    return PathStats(duration, path_length, displacement, mean_angle, path_length / duration)
