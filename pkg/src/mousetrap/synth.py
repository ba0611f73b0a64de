"""Function-based synthetic trajectory generator.

Three path shapes (linear, quadratic, exponential) crossed with three
velocity spacing laws (1 = constant, 2 = logarithmic/accelerating,
3 = gaussian/accelerate-then-decelerate) give nine bot behaviors. Shapes are
fitted through the requested endpoints with one parameter held fixed; point
counts follow per-direction Gaussian statistics estimated from human data.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .trajectory import Trajectory

__all__ = [
    "SHAPES",
    "VP_KINDS",
    "FUNCTION_ATTACK_TAGS",
    "ATTACK_TAGS",
    "DIRECTIONS",
    "ShapeSpec",
    "VelocityKind",
    "DirectionStats",
    "synth_trajectory",
    "sample_point_count",
    "estimate_direction_stats",
    "estimate_shape_ranges",
    "sample_shape_spec",
    "default_shape_ranges",
    "attack_tag",
    "split_attack_tag",
]

SHAPES = ("linear", "quadratic", "exponential")
VP_KINDS = (1, 2, 3)
FUNCTION_ATTACK_TAGS = tuple(f"{s}_vp{v}" for s in SHAPES for v in VP_KINDS)
ATTACK_TAGS = FUNCTION_ATTACK_TAGS + ("gan",)

# Keypoint segment tags in task order (segment i -> i+1, wrapping 8 -> 1).
DIRECTIONS = ("1-2", "2-3", "3-4", "4-5", "5-6", "6-7", "7-8", "8-1")


def attack_tag(shape: str, vp_kind: int) -> str:
    tag = f"{shape}_vp{vp_kind}"
    if tag not in FUNCTION_ATTACK_TAGS:
        raise ConfigError(f"unknown attack combination {shape!r} / vp {vp_kind}")
    return tag


def split_attack_tag(tag: str) -> tuple[str, int]:
    if tag not in FUNCTION_ATTACK_TAGS:
        raise ConfigError(f"unknown function attack tag {tag!r}")
    shape, vp = tag.rsplit("_vp", 1)
    return shape, int(vp)


@dataclass(frozen=True)
class ShapeSpec:
    """Path shape family plus the single parameter held fixed.

    quadratic: y = a x^2 + b x + c, fix one of a/b/c.
    linear:    y = b x + c, both determined by the endpoints (nothing fixed).
    exponential: y = c + b exp(a (x - x1)), anchored at the start x; a is the
    explored parameter, b and c follow from the endpoints.
    """

    kind: str
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SHAPES:
            raise ConfigError(f"unknown shape kind {self.kind!r}")
        if self.kind == "linear":
            if self.fixed:
                raise ConfigError("linear shape takes no fixed parameter")
        elif self.kind == "exponential":
            if set(self.fixed) != {"a"}:
                raise ConfigError("exponential shape fixes exactly parameter 'a'")
        else:
            if len(self.fixed) != 1 or not set(self.fixed) <= {"a", "b", "c"}:
                raise ConfigError("quadratic shape fixes exactly one of a, b, c")


@dataclass(frozen=True)
class VelocityKind:
    """Inter-point spacing law along the independent axis."""

    kind: int
    mu_p: float = 0.45    # gaussian: relative position of the fastest spacing
    width: float = 0.25   # gaussian: relative width
    growth: float = 9.0   # logarithmic: growth rate

    def __post_init__(self):
        if self.kind not in VP_KINDS:
            raise ConfigError(f"velocity profile kind must be one of {VP_KINDS}")
        if self.kind == 3 and not (0 < self.mu_p < 1 and self.width > 0):
            raise ConfigError("gaussian profile needs mu_p in (0,1) and width > 0")
        if self.kind == 2 and not self.growth > 0:
            raise ConfigError("logarithmic profile needs growth > 0")


@dataclass(frozen=True)
class DirectionStats:
    """Per-direction (mean, std) of trajectory point counts."""

    stats: dict

    def __post_init__(self):
        for tag, (mean, std) in self.stats.items():
            if mean < 4 or std < 0:
                raise DataError(f"invalid point-count stats for {tag!r}: ({mean}, {std})")

    def as_dict(self) -> dict:
        return {tag: {"mean": m, "std": s} for tag, (m, s) in self.stats.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "DirectionStats":
        return cls({tag: (float(v["mean"]), float(v["std"])) for tag, v in d.items()})


def _spacings(vp: VelocityKind, m: int) -> np.ndarray:
    """m-1 positive relative spacings implementing the chosen profile."""
    j = np.arange(1, m, dtype=float)
    if vp.kind == 1:
        w = np.ones(m - 1)
    elif vp.kind == 2:
        w = np.log1p(vp.growth * j / (m - 1))
    else:
        s = j / m
        w = np.exp(-((s - vp.mu_p) ** 2) / (2.0 * vp.width**2))
    return w


def _fit_quadratic(u1, v1, u2, v2, fixed: dict) -> tuple[float, float, float]:
    (name, value), = fixed.items()
    if name == "a":
        a = value
        b = (v2 - v1 - a * (u2**2 - u1**2)) / (u2 - u1)
        c = v1 - a * u1**2 - b * u1
    elif name == "b":
        b = value
        denom = u2**2 - u1**2
        if abs(denom) < 1e-12:
            raise ConfigError("quadratic with fixed b unfittable: symmetric endpoints")
        a = (v2 - v1 - b * (u2 - u1)) / denom
        c = v1 - a * u1**2 - b * u1
    else:
        c = value
        det = u1**2 * u2 - u2**2 * u1
        if abs(det) < 1e-12:
            raise ConfigError("quadratic with fixed c unfittable at these endpoints")
        a = ((v1 - c) * u2 - (v2 - c) * u1) / det
        b = ((v2 - c) * u1**2 - (v1 - c) * u2**2) / det
    return a, b, c


def _shape_values(shape: ShapeSpec, u: np.ndarray, v1: float, v2: float) -> np.ndarray:
    """Dependent-axis values through (u[0], v1) and (u[-1], v2)."""
    u1, u2 = u[0], u[-1]
    if shape.kind == "linear":
        return v1 + (v2 - v1) * (u - u1) / (u2 - u1)
    if shape.kind == "quadratic":
        a, b, c = _fit_quadratic(u1, v1, u2, v2, shape.fixed)
        return a * u**2 + b * u + c
    a = shape.fixed["a"]
    z = a * (u - u1)
    if abs(a * (u2 - u1)) < 1e-9:
        raise ConfigError("exponential shape with a ~ 0 is unfittable; use linear")
    if abs(a * (u2 - u1)) > 50:
        raise ConfigError("exponential growth a out of numeric range for this span")
    return v1 + (v2 - v1) * np.expm1(z) / np.expm1(a * (u2 - u1))


def synth_trajectory(shape: ShapeSpec, vp: VelocityKind,
                     start: tuple[float, float], end: tuple[float, float],
                     m: int, rate_hz: float = 200.0,
                     direction: str | None = None) -> Trajectory:
    """Generate one function-based bot trajectory with m points.

    The independent axis is x, or y when the movement is steeper than 45
    degrees (shape functions are single-valued in their argument); the frame
    is swapped back on output. Timestamps are uniform at rate_hz.
    """
    if m < 4:
        raise ConfigError(f"need at least 4 points, got {m}")
    if rate_hz <= 0:
        raise ConfigError("rate_hz must be positive")
    x1, y1 = float(start[0]), float(start[1])
    x2, y2 = float(end[0]), float(end[1])
    swap = abs(x2 - x1) < abs(y2 - y1)
    if swap:
        (u1, v1), (u2, v2) = (y1, x1), (y2, x2)
    else:
        (u1, v1), (u2, v2) = (x1, y1), (x2, y2)
    if u1 == u2:
        raise ConfigError("degenerate movement: start equals end")

    w = _spacings(vp, m)
    u = u1 + np.concatenate([[0.0], np.cumsum(w)]) * ((u2 - u1) / float(np.sum(w)))
    u[-1] = u2
    v = _shape_values(shape, u, v1, v2)
    v[0], v[-1] = v1, v2

    t = np.arange(m, dtype=float) / rate_hz
    xs, ys = (v, u) if swap else (u, v)
    src = attack_tag(shape.kind, vp.kind)
    return Trajectory(xs, ys, t, direction=direction, source=src)


def sample_point_count(stats: DirectionStats, direction: str, rng: np.random.Generator) -> int:
    """Gaussian draw of the point count for one direction, clamped to >= 4."""
    if direction not in stats.stats:
        raise DataError(f"no point-count stats for direction {direction!r}")
    mean, std = stats.stats[direction]
    return max(4, int(round(rng.normal(mean, std))))


def estimate_direction_stats(trajs) -> DirectionStats:
    """Sample mean/std (n-1) of point counts per direction tag."""
    buckets: dict[str, list[int]] = {}
    for tr in trajs:
        if tr.direction is not None:
            buckets.setdefault(tr.direction, []).append(tr.n_points)
    missing = [tag for tag, counts in buckets.items() if len(counts) < 2]
    if not buckets or missing:
        raise DataError(f"need >= 2 trajectories per direction; missing or thin: {missing or 'all'}")
    out = {}
    for tag, counts in buckets.items():
        arr = np.asarray(counts, dtype=float)
        out[tag] = (float(np.mean(arr)), float(np.std(arr, ddof=1)))
    return DirectionStats(out)


def _fit_shape_family(u, v, kind: str):
    """Least-squares parameters of one shape family for one trajectory."""
    if kind == "linear":
        coef = np.polyfit(u, v, 1)
        return {"a": 0.0, "b": float(coef[0]), "c": float(coef[1])}
    if kind == "quadratic":
        coef = np.polyfit(u, v, 2)
        return {"a": float(coef[0]), "b": float(coef[1]), "c": float(coef[2])}
    # exponential: variable projection; scan the nonlinear rate, solve b,c
    # linearly for each candidate. Rate expressed per unit span to stay in
    # floating range, converted back to per-pixel units.
    span = u[-1] - u[0]
    un = (u - u[0]) / span
    best = None
    for a_n in np.linspace(-8.0, 8.0, 81):
        if abs(a_n) < 1e-6:
            continue
        basis = np.column_stack([np.ones_like(un), np.expm1(a_n * un)])
        coef, res, rank, _ = np.linalg.lstsq(basis, v, rcond=None)
        if rank < 2:
            continue
        sse = float(res[0]) if len(res) else float(np.sum((basis @ coef - v) ** 2))
        if best is None or sse < best[0]:
            best = (sse, a_n, coef)
    if best is None:
        raise np.linalg.LinAlgError("exponential fit degenerate")
    _, a_n, coef = best
    # y = c' + b'(exp(a_n*un) - 1) = (c' - b') + b' exp((a_n/span)(u-u0))
    return {"a": float(a_n / span), "b": float(coef[1]), "c": float(coef[0] - coef[1])}


def estimate_shape_ranges(trajs) -> dict:
    """Fit each trajectory to each shape family; emit [p5, p95] per parameter.

    Trajectories steeper than 45 degrees are fitted in the swapped frame,
    matching how synth_trajectory generates them. Degenerate fits are skipped
    with a warning.
    """
    trajs = list(trajs)
    if len(trajs) < 10:
        raise DataError(f"need >= 10 trajectories to estimate shape ranges, got {len(trajs)}")
    samples: dict[str, dict[str, list[float]]] = {
        kind: {"a": [], "b": [], "c": []} for kind in SHAPES
    }
    for tr in trajs:
        swap = abs(tr.x[-1] - tr.x[0]) < abs(tr.y[-1] - tr.y[0])
        u, v = (tr.y, tr.x) if swap else (tr.x, tr.y)
        if abs(u[-1] - u[0]) < 1e-9:
            warnings.warn("skipping degenerate trajectory (zero span)")
            continue
        for kind in SHAPES:
            try:
                params = _fit_shape_family(u, v, kind)
            except np.linalg.LinAlgError:
                warnings.warn(f"skipping degenerate {kind} fit")
                continue
            for name, val in params.items():
                samples[kind][name].append(val)
    ranges: dict[str, dict[str, tuple[float, float]]] = {}
    for kind in SHAPES:
        ranges[kind] = {}
        for name, vals in samples[kind].items():
            if not vals:
                raise DataError(f"no usable fits for shape {kind!r}")
            arr = np.asarray(vals)
            ranges[kind][name] = (float(np.percentile(arr, 5)), float(np.percentile(arr, 95)))
    return ranges


def default_shape_ranges() -> dict:
    """Built-in parameter ranges for generation without a human fit."""
    return {
        "linear": {"a": (0.0, 0.0), "b": (-2.0, 2.0), "c": (-500.0, 500.0)},
        "quadratic": {"a": (-3e-3, 3e-3), "b": (-2.0, 2.0), "c": (-500.0, 500.0)},
        "exponential": {"a": (-8e-3, 8e-3), "b": (-200.0, 200.0), "c": (-500.0, 500.0)},
    }


def sample_shape_spec(kind: str, ranges: dict, rng: np.random.Generator,
                      span: float | None = None) -> ShapeSpec:
    """Draw a ShapeSpec with its fixed parameter sampled from the ranges."""
    if kind == "linear":
        return ShapeSpec("linear")
    if kind == "exponential":
        lo, hi = ranges["exponential"]["a"]
        if span is not None:
            # keep the exponent within floating range for this span
            cap = 40.0 / max(span, 1.0)
            lo, hi = max(lo, -cap), min(hi, cap)
        a = rng.uniform(lo, hi)
        if abs(a) * (span or 1.0) < 1e-6:
            a = (1e-6 / max(span or 1.0, 1.0)) * (1 if rng.random() < 0.5 else -1)
        return ShapeSpec("exponential", {"a": a})
    name = ("a", "b", "c")[rng.integers(0, 3)]
    lo, hi = ranges["quadratic"][name]
    return ShapeSpec("quadratic", {name: rng.uniform(lo, hi)})
