"""Generator and discriminator networks plus the trained-bundle container.

The generator projects a Gaussian seed vector into the initial hidden and
cell states of two LSTM layers, unrolls them for a fixed number of steps
with zero per-step input, and maps each step through a 2-unit affine output
(normalized x, y). The discriminator runs the coordinate sequence through
two LSTM layers and a 1-unit sigmoid head reading the final hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError
from ..trajectory import Trajectory, resample_count
from .lstm import LSTMLayer, glorot

__all__ = ["GanConfig", "Normalizer", "Generator", "Discriminator", "GanBundle",
           "generate", "discriminate", "discriminate_batch"]


@dataclass(frozen=True)
class GanConfig:
    R: int = 100                    # seed vector length
    M: int = 50                     # output sequence length
    gen_units: tuple[int, ...] = (32, 16)
    disc_units: tuple[int, ...] = (32, 16)
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 50
    batch: int = 128
    rate_hz: float = 200.0
    seed: int = 0

    def __post_init__(self):
        if self.R < 1:
            raise ConfigError("seed length R must be >= 1")
        if self.M < 4:
            raise ConfigError("sequence length M must be >= 4")
        if any(u < 1 for u in self.gen_units + self.disc_units):
            raise ConfigError("all unit counts must be >= 1")

    @classmethod
    def paper(cls, **overrides) -> "GanConfig":
        """Hyperparameters as published: LSTM sizes (128, 64)."""
        base = dict(gen_units=(128, 64), disc_units=(128, 64))
        base.update(overrides)
        return cls(**base)

    @classmethod
    def desk(cls, **overrides) -> "GanConfig":
        """Reduced sizes for laptop-scale runs: LSTM sizes (32, 16)."""
        base = dict(gen_units=(32, 16), disc_units=(32, 16))
        base.update(overrides)
        return cls(**base)

    def as_dict(self) -> dict:
        return {
            "R": self.R, "M": self.M,
            "gen_units": list(self.gen_units), "disc_units": list(self.disc_units),
            "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps,
            "epochs": self.epochs, "batch": self.batch,
            "rate_hz": self.rate_hz, "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GanConfig":
        d = dict(d)
        d["gen_units"] = tuple(d["gen_units"])
        d["disc_units"] = tuple(d["disc_units"])
        return cls(**d)


@dataclass(frozen=True)
class Normalizer:
    """Per-axis affine map between pixel coordinates and [-1, 1]."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def _spans(self):
        return max(self.x_max - self.x_min, 1e-9), max(self.y_max - self.y_min, 1e-9)

    def normalize(self, coords: np.ndarray) -> np.ndarray:
        sx, sy = self._spans()
        out = np.empty_like(coords, dtype=float)
        out[..., 0] = 2.0 * (coords[..., 0] - self.x_min) / sx - 1.0
        out[..., 1] = 2.0 * (coords[..., 1] - self.y_min) / sy - 1.0
        return out

    def denormalize(self, coords: np.ndarray) -> np.ndarray:
        sx, sy = self._spans()
        out = np.empty_like(coords, dtype=float)
        out[..., 0] = (coords[..., 0] + 1.0) * sx / 2.0 + self.x_min
        out[..., 1] = (coords[..., 1] + 1.0) * sy / 2.0 + self.y_min
        return out

    @classmethod
    def from_corpus(cls, coords: np.ndarray) -> "Normalizer":
        return cls(float(coords[..., 0].min()), float(coords[..., 0].max()),
                   float(coords[..., 1].min()), float(coords[..., 1].max()))

    def as_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max,
                "y_min": self.y_min, "y_max": self.y_max}

    @classmethod
    def from_dict(cls, d: dict) -> "Normalizer":
        return cls(float(d["x_min"]), float(d["x_max"]),
                   float(d["y_min"]), float(d["y_max"]))


class Generator:
    def __init__(self, R: int, M: int, units: tuple[int, ...],
                 activation: str = "relu", rng: np.random.Generator | None = None,
                 out_dim: int = 2):
        rng = rng or np.random.default_rng()
        self.R, self.M, self.units, self.out_dim = R, M, tuple(units), out_dim
        self.activation = activation
        self.layers: list[LSTMLayer] = []
        self.params: dict[str, np.ndarray] = {}
        in_dim = 1  # zero per-step input; the seed enters via initial states
        for li, u in enumerate(self.units):
            layer = LSTMLayer(in_dim, u, activation=activation, name=f"g{li}", rng=rng)
            self.layers.append(layer)
            self.params.update(layer.params)
            self.params[f"g{li}.Ph"] = glorot(rng, (u, R))
            self.params[f"g{li}.ph"] = np.zeros(u)
            self.params[f"g{li}.Pc"] = glorot(rng, (u, R))
            self.params[f"g{li}.pc"] = np.zeros(u)
            in_dim = u
        self.params["out.W"] = glorot(rng, (out_dim, self.units[-1]))
        self.params["out.b"] = np.zeros(out_dim)

    def _sync_layers(self):
        for li, layer in enumerate(self.layers):
            for suffix in ("Wx", "Wh", "b"):
                layer.params[f"g{li}.{suffix}"] = self.params[f"g{li}.{suffix}"]

    def forward(self, noise: np.ndarray):
        """noise: (B, R) -> normalized coordinates (M, B, 2) plus cache."""
        if noise.ndim != 2 or noise.shape[1] != self.R:
            raise DataError(f"noise must have shape (B, {self.R})")
        self._sync_layers()
        B = noise.shape[0]
        xs = np.zeros((self.M, B, 1))
        cache = {"noise": noise, "layer": []}
        for li, layer in enumerate(self.layers):
            h0 = noise @ self.params[f"g{li}.Ph"].T + self.params[f"g{li}.ph"]
            c0 = noise @ self.params[f"g{li}.Pc"].T + self.params[f"g{li}.pc"]
            hs, lcache = layer.forward(xs, h0, c0)
            cache["layer"].append(lcache)
            xs = hs
        cache["top"] = xs
        ys = xs @ self.params["out.W"].T + self.params["out.b"]
        return ys, cache

    def backward(self, dys: np.ndarray, cache: dict) -> dict[str, np.ndarray]:
        noise = cache["noise"]
        grads = {
            "out.W": np.einsum("tbi,tbj->ij", dys, cache["top"]),
            "out.b": dys.sum(axis=(0, 1)),
        }
        dhs = dys @ self.params["out.W"]
        for li in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[li]
            dxs, dh0, dc0, lgrads = layer.backward(dhs, None, None, cache["layer"][li])
            grads.update(lgrads)
            grads[f"g{li}.Ph"] = dh0.T @ noise
            grads[f"g{li}.ph"] = dh0.sum(axis=0)
            grads[f"g{li}.Pc"] = dc0.T @ noise
            grads[f"g{li}.pc"] = dc0.sum(axis=0)
            dhs = dxs
        return grads

    def as_dict(self) -> dict:
        return {"R": self.R, "M": self.M, "units": list(self.units),
                "activation": self.activation, "out_dim": self.out_dim,
                "params": {k: v.tolist() for k, v in self.params.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "Generator":
        gen = cls(d["R"], d["M"], tuple(d["units"]), d["activation"], out_dim=d["out_dim"])
        gen.params = {k: np.asarray(v, dtype=float) for k, v in d["params"].items()}
        gen._sync_layers()
        return gen


class Discriminator:
    def __init__(self, in_dim: int = 2, units: tuple[int, ...] = (32, 16),
                 activation: str = "leaky_relu",
                 rng: np.random.Generator | None = None):
        rng = rng or np.random.default_rng()
        self.in_dim, self.units = in_dim, tuple(units)
        self.activation = activation
        self.layers: list[LSTMLayer] = []
        self.params: dict[str, np.ndarray] = {}
        dim = in_dim
        for li, u in enumerate(self.units):
            layer = LSTMLayer(dim, u, activation=activation, name=f"d{li}", rng=rng)
            self.layers.append(layer)
            self.params.update(layer.params)
            dim = u
        self.params["out.W"] = glorot(rng, (1, self.units[-1]))
        self.params["out.b"] = np.zeros(1)

    def _sync_layers(self):
        for li, layer in enumerate(self.layers):
            for suffix in ("Wx", "Wh", "b"):
                layer.params[f"d{li}.{suffix}"] = self.params[f"d{li}.{suffix}"]

    def forward(self, coords: np.ndarray):
        """coords: (M, B, in_dim) -> logits (B,) plus cache."""
        self._sync_layers()
        M, B, _ = coords.shape
        xs = coords
        cache = {"layer": []}
        for li, layer in enumerate(self.layers):
            zeros = np.zeros((B, layer.units))
            hs, lcache = layer.forward(xs, zeros, zeros)
            cache["layer"].append(lcache)
            xs = hs
        cache["last"] = xs[-1]
        logits = cache["last"] @ self.params["out.W"].T + self.params["out.b"]
        return logits[:, 0], cache

    def backward(self, dlogits: np.ndarray, cache: dict, want_dinput: bool = False):
        dl = dlogits[:, None]
        grads = {
            "out.W": dl.T @ cache["last"],
            "out.b": dl.sum(axis=0),
        }
        dh_last = dl @ self.params["out.W"]
        dhs = None
        dcoords = None
        for li in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[li]
            dxs, _, _, lgrads = layer.backward(dhs, dh_last, None, cache["layer"][li])
            grads.update(lgrads)
            dh_last = None
            dhs = dxs
            if li == 0:
                dcoords = dxs
        return grads, (dcoords if want_dinput else None)

    def as_dict(self) -> dict:
        return {"in_dim": self.in_dim, "units": list(self.units),
                "activation": self.activation,
                "params": {k: v.tolist() for k, v in self.params.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "Discriminator":
        disc = cls(d["in_dim"], tuple(d["units"]), d["activation"])
        disc.params = {k: np.asarray(v, dtype=float) for k, v in d["params"].items()}
        disc._sync_layers()
        return disc


@dataclass
class GanBundle:
    config: GanConfig
    generator: Generator
    discriminator: Discriminator
    norm: Normalizer
    history: dict = field(default_factory=lambda: {"gen_loss": [], "disc_loss": []})

    def as_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "gan_bundle",
            "config": self.config.as_dict(),
            "generator": self.generator.as_dict(),
            "discriminator": self.discriminator.as_dict(),
            "norm": self.norm.as_dict(),
            "history": self.history,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GanBundle":
        if d.get("kind") != "gan_bundle" or d.get("schema_version") != 1:
            raise DataError("not a version-1 gan_bundle container")
        return cls(GanConfig.from_dict(d["config"]),
                   Generator.from_dict(d["generator"]),
                   Discriminator.from_dict(d["discriminator"]),
                   Normalizer.from_dict(d["norm"]),
                   d["history"])


def generate(bundle: GanBundle, noise) -> Trajectory:
    """One synthetic trajectory from a seed vector (length R)."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (bundle.config.R,):
        raise DataError(f"noise must have length R={bundle.config.R}")
    ys, _ = bundle.generator.forward(noise[None, :])
    coords = bundle.norm.denormalize(ys[:, 0, :])
    t = np.arange(bundle.config.M) / bundle.config.rate_hz
    return Trajectory(coords[:, 0], coords[:, 1], t, source="gan")


def prepare_coords(bundle_norm: Normalizer, trajs, m: int) -> np.ndarray:
    """(M, n, 2) normalized coordinate tensor, resampling each to m points."""
    out = np.empty((m, len(trajs), 2))
    for j, tr in enumerate(trajs):
        rs = resample_count(tr, m)
        out[:, j, 0] = rs.x
        out[:, j, 1] = rs.y
    return bundle_norm.normalize(out)


def discriminate_batch(bundle: GanBundle, trajs) -> np.ndarray:
    """Probability-human scores for a batch of trajectories."""
    coords = prepare_coords(bundle.norm, list(trajs), bundle.config.M)
    logits, _ = bundle.discriminator.forward(coords)
    return 1.0 / (1.0 + np.exp(-logits))


def discriminate(bundle: GanBundle, traj: Trajectory) -> float:
    """Probability that one trajectory is human, in (0, 1)."""
    return float(discriminate_batch(bundle, [traj])[0])
