"""Human-surrogate trajectory generator.

Builds pointing movements as random compositions of 3-6 lognormal strokes
integrated along heading-interpolated paths: a dominant early stroke, a few
overlapping mid-movement strokes, and small end-of-movement corrections.
Used for desk-scale experiments, adversarial training, and demos where a
real human corpus is unavailable.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError
from .lognormal import LognormalStroke, stroke_velocity
from .synth import DIRECTIONS
from .trajectory import Trajectory

__all__ = [
    "KEYPOINTS",
    "segment_endpoints",
    "trajectory_from_strokes",
    "sample_strokes",
    "sample_human_trajectory",
    "sample_human_set",
]

# Canonical 8-keypoint click task layout (pixels): mixes long rightward,
# oblique, vertical, and short segments.
KEYPOINTS = (
    (120.0, 320.0),
    (880.0, 300.0),
    (140.0, 90.0),
    (860.0, 540.0),
    (420.0, 120.0),
    (430.0, 520.0),
    (240.0, 460.0),
    (200.0, 300.0),
)


def segment_endpoints(direction: str) -> tuple[tuple[float, float], tuple[float, float]]:
    """Start/end keypoints of one task segment, e.g. '3-4' or '8-1'."""
    if direction not in DIRECTIONS:
        raise ConfigError(f"unknown direction tag {direction!r}")
    a, b = direction.split("-")
    return KEYPOINTS[int(a) - 1], KEYPOINTS[int(b) - 1]


def trajectory_from_strokes(strokes, start: tuple[float, float], duration: float,
                            rate_hz: float = 200.0, direction: str | None = None,
                            source: str = "human") -> Trajectory:
    """Integrate stroke speeds along interpolated headings into an (x, y, t) path.

    Each stroke's heading rotates from theta_s to theta_e as the stroke
    covers its distance; the planar velocity is the vector sum over strokes.
    """
    if duration <= 0:
        raise ConfigError("duration must be positive")
    n = max(int(round(duration * rate_hz)), 7)
    t = np.arange(n + 1, dtype=float) / rate_hz
    dt = 1.0 / rate_hz
    vx = np.zeros_like(t)
    vy = np.zeros_like(t)
    for s in strokes:
        v = stroke_velocity(s, t)
        # progress = fraction of the stroke distance covered so far
        cum = np.concatenate([[0.0], np.cumsum((v[1:] + v[:-1]) * 0.5 * dt)])
        total = max(cum[-1], 1e-12)
        heading = s.theta_s + (s.theta_e - s.theta_s) * np.clip(cum / total, 0.0, 1.0)
        vx += v * np.cos(heading)
        vy += v * np.sin(heading)
    x = start[0] + np.concatenate([[0.0], np.cumsum((vx[1:] + vx[:-1]) * 0.5 * dt)])
    y = start[1] + np.concatenate([[0.0], np.cumsum((vy[1:] + vy[:-1]) * 0.5 * dt)])
    return Trajectory(x, y, t, direction=direction, source=source)


def sample_strokes(rng: np.random.Generator, distance: float, heading: float,
                   duration: float, n_strokes: int,
                   wobble: float = 0.3) -> list[LognormalStroke]:
    """Draw one plausible stroke composition for a pointing movement.

    wobble scales the heading variability (careful vs sloppy movers)."""
    strokes = []
    # dominant stroke: covers most of the distance, peaks in the first half
    sigma = rng.uniform(0.18, 0.48)
    t0 = rng.uniform(0.0, 0.08) * duration
    peak = rng.uniform(0.20, 0.45) * duration
    mu = math.log(max(peak - t0, 0.02)) + sigma**2
    th = heading + wobble * rng.uniform(-0.4, 0.4)
    strokes.append(LognormalStroke(
        D=distance * rng.uniform(0.55, 0.98), t0=t0, mu=mu, sigma=sigma,
        theta_s=th, theta_e=th + wobble * rng.uniform(-0.8, 0.8)))
    # mid-movement overlaps and end-of-movement corrections
    for k in range(1, n_strokes):
        last = k == n_strokes - 1
        sigma = rng.uniform(0.12, 0.50)
        if last:
            t0 = rng.uniform(0.50, 0.80) * duration
            peak_off = rng.uniform(0.06, 0.20) * duration
            d = distance * rng.uniform(0.005, 0.10)
            spread = 2.5
        else:
            t0 = rng.uniform(0.12, 0.55) * duration
            peak_off = rng.uniform(0.06, 0.25) * duration
            d = distance * rng.uniform(0.02, 0.28)
            spread = 1.4
        mu = math.log(max(peak_off, 0.015)) + sigma**2
        th = heading + wobble * rng.uniform(-spread, spread)
        strokes.append(LognormalStroke(
            D=max(d, 1e-3), t0=t0, mu=mu, sigma=sigma,
            theta_s=th, theta_e=th + wobble * rng.uniform(-1.5, 1.5)))
    return strokes


def sample_human_trajectory(rng: np.random.Generator,
                            start: tuple[float, float] | None = None,
                            end: tuple[float, float] | None = None,
                            direction: str | None = None,
                            rate_hz: float = 200.0) -> Trajectory:
    """One surrogate human movement, optionally pinned to a task segment.

    Each draw carries its own style (tempo, sloppiness), emulating the
    spread across users that a real corpus shows."""
    if start is None or end is None:
        direction = direction or str(rng.choice(DIRECTIONS))
        k_start, k_end = segment_endpoints(direction)
        jitter = lambda p: (p[0] + rng.uniform(-20, 20), p[1] + rng.uniform(-20, 20))
        start, end = jitter(k_start), jitter(k_end)
    distance = math.hypot(end[0] - start[0], end[1] - start[1])
    heading = math.atan2(end[1] - start[1], end[0] - start[0])
    tempo = float(rng.lognormal(0.0, 0.35))
    duration = (0.26 + 0.52 * math.sqrt(distance / 900.0)) * tempo * rng.uniform(0.8, 1.3)
    duration = max(duration, 0.2)
    wobble = float(rng.uniform(0.05, 0.70))
    n_strokes = int(rng.integers(3, 7))
    strokes = sample_strokes(rng, distance, heading, duration, n_strokes, wobble)
    return trajectory_from_strokes(strokes, start, duration, rate_hz, direction=direction)


def sample_human_set(n: int, rng: np.random.Generator,
                     rate_hz: float = 200.0) -> list[Trajectory]:
    """n surrogate movements cycling through the 8 task segments."""
    return [
        sample_human_trajectory(rng, direction=DIRECTIONS[i % len(DIRECTIONS)],
                                rate_hz=rate_hz)
        for i in range(n)
    ]
