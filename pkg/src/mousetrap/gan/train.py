"""Adversarial training loop and the supervised recurrent detector."""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, NumericError
from ..optim import Adam
from ..trajectory import resample_count
from .lstm import sigmoid
from .model import (
    Discriminator,
    GanBundle,
    GanConfig,
    Generator,
    Normalizer,
    discriminate_batch,
    prepare_coords,
)

__all__ = ["train_gan", "RnnDetectorConfig", "RnnDetector",
           "train_recurrent_detector", "discriminator_as_detector"]


def _bce(logits: np.ndarray, targets: np.ndarray) -> float:
    return float(np.mean(np.log1p(np.exp(-np.abs(logits)))
                         + np.maximum(logits, 0.0) - logits * targets))


def _corpus(trajs, m: int):
    coords = np.empty((m, len(trajs), 2))
    for j, tr in enumerate(trajs):
        rs = resample_count(tr, m)
        coords[:, j, 0] = rs.x
        coords[:, j, 1] = rs.y
    norm = Normalizer.from_corpus(coords)
    return norm.normalize(coords), norm


def train_gan(humans, cfg: GanConfig | None = None) -> GanBundle:
    """Alternate generator/discriminator updates over the human corpus.

    Each iteration first updates the generator toward the 'human' label with
    the discriminator weights frozen, then updates the discriminator on a
    balanced batch of real movements and fresh fakes. Aborts with the last
    epoch-end checkpoint attached if a loss turns non-finite.
    """
    cfg = cfg or GanConfig()
    humans = list(humans)
    if len(humans) < 2 * cfg.batch:
        raise DataError(f"need >= {2 * cfg.batch} human trajectories, got {len(humans)}")
    coords, norm = _corpus(humans, cfg.M)
    n = coords.shape[1]
    rng = np.random.default_rng(cfg.seed)
    gen = Generator(cfg.R, cfg.M, cfg.gen_units, activation="relu", rng=rng)
    disc = Discriminator(2, cfg.disc_units, activation="leaky_relu", rng=rng)
    opt_g = Adam(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
    opt_d = Adam(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
    history = {"gen_loss": [], "disc_loss": []}
    checkpoint = GanBundle(cfg, copy.deepcopy(gen), copy.deepcopy(disc), norm,
                           copy.deepcopy(history))

    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        g_losses, d_losses = [], []
        for lo in range(0, n - cfg.batch + 1, cfg.batch):
            real = coords[:, order[lo:lo + cfg.batch], :]
            B = real.shape[1]

            # generator step: w_D read-only
            noise = rng.standard_normal((B, cfg.R))
            fakes, gcache = gen.forward(noise)
            logits, dcache = disc.forward(fakes)
            g_loss = _bce(logits, np.ones(B))
            dlogits = (sigmoid(logits) - 1.0) / B
            _, dfakes = disc.backward(dlogits, dcache, want_dinput=True)
            g_grads = gen.backward(dfakes, gcache)
            opt_g.step(gen.params, g_grads)

            # discriminator step: balanced real vs fresh fakes
            noise2 = rng.standard_normal((B, cfg.R))
            fresh, _ = gen.forward(noise2)
            batch = np.concatenate([real, fresh], axis=1)
            targets = np.concatenate([np.ones(B), np.zeros(B)])
            logits, dcache = disc.forward(batch)
            d_loss = _bce(logits, targets)
            dlogits = (sigmoid(logits) - targets) / (2 * B)
            d_grads, _ = disc.backward(dlogits, dcache)
            opt_d.step(disc.params, d_grads)

            if not (np.isfinite(g_loss) and np.isfinite(d_loss)):
                err = NumericError(
                    f"GAN training diverged at epoch {epoch} (g={g_loss}, d={d_loss})")
                err.checkpoint = checkpoint
                raise err
            g_losses.append(g_loss)
            d_losses.append(d_loss)

        history["gen_loss"].append(float(np.mean(g_losses)))
        history["disc_loss"].append(float(np.mean(d_losses)))
        checkpoint = GanBundle(cfg, copy.deepcopy(gen), copy.deepcopy(disc), norm,
                               copy.deepcopy(history))

    return GanBundle(cfg, gen, disc, norm, history)


@dataclass(frozen=True)
class RnnDetectorConfig:
    units: tuple[int, ...] = (32, 16)
    M: int = 50
    lr: float = 1e-3
    epochs: int = 30
    batch: int = 64
    seed: int = 0
    activation: str = "tanh"
    input_diffs: bool = True  # feed per-step (dx, dy) channels alongside (x, y)


def _detector_inputs(coords: np.ndarray, input_diffs: bool,
                     mean=None, std=None):
    """(M, n, 2) normalized coords -> standardized input tensor.

    The per-step first differences carry the velocity structure that
    separates bots from humans; standardization lifts them to unit scale
    (they are an order of magnitude smaller than the positions)."""
    if input_diffs:
        d = np.zeros_like(coords)
        d[1:] = np.diff(coords, axis=0)
        x = np.concatenate([coords, d], axis=2)
    else:
        x = coords
    if mean is None:
        mean = x.mean(axis=(0, 1))
        std = x.std(axis=(0, 1))
        std = np.where(std > 0, std, 1.0)
    return (x - mean) / std, mean, std


class RnnDetector:
    """Discriminator-architecture network trained supervised on raw
    trajectories (human = 1, bot = 0)."""

    def __init__(self, net: Discriminator, norm: Normalizer, m: int,
                 mean: np.ndarray, std: np.ndarray, input_diffs: bool = True,
                 cfg: RnnDetectorConfig | None = None):
        self.net = net
        self.norm = norm
        self.m = m
        self.mean = mean
        self.std = std
        self.input_diffs = input_diffs
        self.cfg = cfg

    def predict_proba(self, trajs) -> np.ndarray:
        coords = prepare_coords(self.norm, list(trajs), self.m)
        x, _, _ = _detector_inputs(coords, self.input_diffs, self.mean, self.std)
        logits, _ = self.net.forward(x)
        return sigmoid(logits)

    def as_dict(self) -> dict:
        return {"net": self.net.as_dict(), "norm": self.norm.as_dict(), "m": self.m,
                "mean": self.mean.tolist(), "std": self.std.tolist(),
                "input_diffs": self.input_diffs}

    @classmethod
    def from_dict(cls, d: dict) -> "RnnDetector":
        return cls(Discriminator.from_dict(d["net"]), Normalizer.from_dict(d["norm"]),
                   int(d["m"]), np.asarray(d["mean"], dtype=float),
                   np.asarray(d["std"], dtype=float), bool(d["input_diffs"]))


def train_recurrent_detector(trajs, labels, cfg: RnnDetectorConfig | None = None) -> RnnDetector:
    """Supervised binary cross-entropy training of the recurrent detector."""
    cfg = cfg or RnnDetectorConfig()
    trajs = list(trajs)
    y = np.asarray(labels, dtype=float)
    if len(trajs) != len(y) or len(trajs) < 2:
        raise DataError("need matching trajectories and labels")
    coords, norm = _corpus(trajs, cfg.M)
    x, mean, std = _detector_inputs(coords, cfg.input_diffs)
    n = x.shape[1]
    rng = np.random.default_rng(cfg.seed)
    net = Discriminator(x.shape[2], cfg.units, activation=cfg.activation, rng=rng)
    opt = Adam(cfg.lr, 0.9, 0.999, 1e-8)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch):
            idx = order[lo:lo + cfg.batch]
            logits, cache = net.forward(x[:, idx, :])
            loss = _bce(logits, y[idx])
            if not np.isfinite(loss):
                raise NumericError(f"detector loss non-finite at epoch {epoch}")
            dlogits = (sigmoid(logits) - y[idx]) / len(idx)
            grads, _ = net.backward(dlogits, cache)
            opt.step(net.params, grads)
    return RnnDetector(net, norm, cfg.M, mean, std, cfg.input_diffs, cfg)


def discriminator_as_detector(bundle: GanBundle, ds) -> "Metrics":
    """Score a labeled raw-trajectory dataset with the trained discriminator.

    Metrics come from classify.evaluate, the single implementation shared by
    every detector in the package.
    """
    from ..classify.metrics import evaluate

    if ds.kind != "trajectories":
        raise DataError("discriminator_as_detector needs a raw-trajectory dataset")
    scores = discriminate_batch(bundle, ds.trajectories)
    return evaluate(scores, ds.y)
