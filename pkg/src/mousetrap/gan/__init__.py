"""Adversarial trajectory generator / discriminator with from-scratch LSTMs."""

from .lstm import LSTMLayer
from .model import (
    Discriminator,
    GanBundle,
    GanConfig,
    Generator,
    Normalizer,
    discriminate,
    discriminate_batch,
    generate,
)
from .train import (
    RnnDetector,
    RnnDetectorConfig,
    discriminator_as_detector,
    train_gan,
    train_recurrent_detector,
)

__all__ = [
    "LSTMLayer",
    "GanConfig", "GanBundle", "Generator", "Discriminator", "Normalizer",
    "generate", "discriminate", "discriminate_batch",
    "train_gan", "RnnDetector", "RnnDetectorConfig",
    "train_recurrent_detector", "discriminator_as_detector",
]
