"""
Stochastic episode views for contrastive training.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Mapping

import numpy as np

from ..gridworld import Episode
from ..utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass
class AugmentConfig:
    min_crop: float = 0.6
    channel_dropout: float = 0.1
    noise_scale: float = 0.01

    def validate(self) -> 'AugmentConfig':
        if not 0.0 < self.min_crop <= 1.0:
            raise ConfigurationError(f"Minimum crop fraction must lie in (0, 1], got {self.min_crop}")
        if not 0.0 <= self.channel_dropout <= 1.0:
            raise ConfigurationError(f"Channel dropout must lie in [0, 1], got {self.channel_dropout}")
        if self.noise_scale < 0:
            raise ConfigurationError("Noise scale must be non-negative")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'AugmentConfig':
        return cls(**data).validate()


def crop_bounds(length: int, min_crop: float) -> tuple:
    """Inclusive range of crop lengths for an episode of ``length`` steps."""
    return max(1, int(np.floor(min_crop * length))), length


def augment(episode: Episode, config: AugmentConfig, rng: np.random.Generator) -> Episode:
    """
    Draw one view: contiguous crop, a channel mask shared by every step,
    then Gaussian noise on all entries.

    Args:
        episode: Source episode (left untouched)
        config: Augmentation settings
        rng: Generator

    Returns:
        New Episode carrying the source return and success flag
    """
    low, high = crop_bounds(episode.length, config.min_crop)
    crop = int(rng.integers(low, high + 1))
    start = int(rng.integers(0, episode.length - crop + 1))
    features = episode.features[start:start + crop].copy()

    keep = rng.random(features.shape[1]) >= config.channel_dropout
    features = features * keep
    if config.noise_scale > 0:
        features = features + config.noise_scale * rng.standard_normal(features.shape)
    return Episode(features, episode.ret, episode.success, episode.seed)
