"""
Boundary-time embedder update: contrastive invariance on augmented views plus
distillation toward a frozen copy of the encoder on anchor episodes.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .augment import AugmentConfig, augment
from .encoder import T_MAX, encode_episodes, encoder_forward, pad_episodes
from .losses import DEFAULT_LAMBDA_NORM, DEFAULT_TEMPERATURE, contrastive_loss, distill_loss
from ..gridworld import Episode, EpisodeSet
from ..neural import (
    DEFAULT_CLIP_NORM,
    adam_step,
    clip_by_global_norm,
    copy_tree,
    init_optimizer,
    value_and_grad,
)
from ..neural.layers import ParamTree
from ..utils.errors import ConfigurationError, InsufficientDataError

logger = logging.getLogger(__name__)


@dataclass
class EmbedderConfig:
    """Encoder sizes and boundary-training settings."""

    steps: int = 700
    learning_rate: float = 5e-4
    batch_size: int = 32
    anchor_fraction: float = 0.33
    min_anchor_rows: int = 8
    temperature: float = DEFAULT_TEMPERATURE
    w_contrast: float = 1.0
    w_distill: float = 1.0
    lambda_norm: float = DEFAULT_LAMBDA_NORM
    max_grad_norm: float = DEFAULT_CLIP_NORM
    t_max: int = T_MAX
    step_hidden: int = 32
    gru_hidden: int = 32
    proj_hidden: int = 16
    latent_dim: int = 8
    augment: AugmentConfig = field(default_factory=AugmentConfig)

    def validate(self) -> 'EmbedderConfig':
        if self.steps < 0:
            raise ConfigurationError("Embedder training steps must be non-negative")
        if self.batch_size < 1 or self.min_anchor_rows < 0:
            raise ConfigurationError("Embedder batch size must be positive")
        if not 0.0 <= self.anchor_fraction <= 1.0:
            raise ConfigurationError(f"Anchor fraction must lie in [0, 1], got {self.anchor_fraction}")
        if self.temperature <= 0 or self.learning_rate <= 0:
            raise ConfigurationError("Temperature and learning rate must be positive")
        if min(self.w_contrast, self.w_distill, self.lambda_norm) < 0:
            raise ConfigurationError("Loss weights must be non-negative")
        if self.latent_dim != 8:
            raise ConfigurationError(f"Latent dimension is fixed at 8, got {self.latent_dim}")
        if self.t_max < 1:
            raise ConfigurationError("T_max must be positive")
        self.augment.validate()
        return self

    def anchor_rows(self, have_anchors: bool, have_replay: bool) -> int:
        """Number of batch rows drawn from the anchor bank."""
        if not have_anchors:
            return 0
        if not have_replay:
            return self.batch_size
        return min(self.batch_size, max(int(round(self.anchor_fraction * self.batch_size)),
                                        self.min_anchor_rows))

    def to_dict(self) -> Dict[str, Any]:
        data = {k: v for k, v in self.__dict__.items() if k != 'augment'}
        data['augment'] = self.augment.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'EmbedderConfig':
        data = dict(data)
        augment_cfg = AugmentConfig(**data.pop('augment', {}))
        return cls(augment=augment_cfg, **data).validate()


class BoundaryTrainResult(NamedTuple):
    encoder: ParamTree
    losses: List[float]
    contrast_losses: List[float]
    distill_losses: List[float]


def _sample_rows(rng: np.random.Generator, bank: Sequence[EpisodeSet], n: int) -> List[Episode]:
    """One uniformly chosen episode from each of ``n`` sets drawn with replacement."""
    picks = []
    for index in rng.integers(0, len(bank), size=n):
        episode_set = bank[int(index)]
        picks.append(episode_set[int(rng.integers(0, len(episode_set)))])
    return picks


def boundary_train(encoder: Mapping[str, np.ndarray],
                   anchors: Sequence[EpisodeSet],
                   replay: Sequence[EpisodeSet],
                   config: EmbedderConfig,
                   rng: np.random.Generator,
                   steps: Optional[int] = None) -> BoundaryTrainResult:
    """
    Update the encoder on mixed anchor/replay batches.

    Each step draws ``batch_size`` rows, two augmented views per row for the
    contrastive term, and the original episodes of anchor rows for the
    distillation term against the frozen copy taken at entry. Distillation is
    skipped on steps with fewer than ``min_anchor_rows`` anchor rows.

    Args:
        encoder: Current encoder (left untouched)
        anchors: Anchor episode sets
        replay: Replay episode sets
        config: Training settings
        rng: Generator for batches and augmentations
        steps: Overrides ``config.steps``

    Returns:
        BoundaryTrainResult with the student parameters and per-step losses

    Raises:
        InsufficientDataError: If both banks are empty
    """
    config.validate()
    total_steps = config.steps if steps is None else int(steps)
    if total_steps > 0 and not anchors and not replay:
        raise InsufficientDataError("Embedder training needs at least one episode set")

    teacher = copy_tree(encoder)
    student = copy_tree(encoder)
    optimizer = init_optimizer(student, lr=config.learning_rate)
    n_anchor = config.anchor_rows(bool(anchors), bool(replay))
    use_distill = n_anchor >= max(1, config.min_anchor_rows) and config.w_distill > 0

    losses, contrast_log, distill_log = [], [], []
    for _ in range(total_steps):
        rows = _sample_rows(rng, anchors, n_anchor) if n_anchor else []
        rows += _sample_rows(rng, replay, config.batch_size - n_anchor) if config.batch_size > n_anchor else []
        view_a = [augment(e, config.augment, rng) for e in rows]
        view_b = [augment(e, config.augment, rng) for e in rows]
        feats_a, len_a = pad_episodes(view_a, config.t_max)
        feats_b, len_b = pad_episodes(view_b, config.t_max)

        anchor_eps = rows[:n_anchor] if use_distill else []
        if anchor_eps:
            teacher_z = encode_episodes(teacher, anchor_eps, config.t_max)
            feats_o, len_o = pad_episodes(anchor_eps, config.t_max)
        parts = {}

        def loss_fn(tensors):
            contrast = contrastive_loss(encoder_forward(tensors, feats_a, len_a),
                                        encoder_forward(tensors, feats_b, len_b),
                                        config.temperature)
            total = contrast * config.w_contrast
            parts['contrast'] = contrast.item()
            parts['distill'] = 0.0
            if anchor_eps:
                distill = distill_loss(encoder_forward(tensors, feats_o, len_o), teacher_z,
                                       np.ones(len(anchor_eps), dtype=bool), config.lambda_norm)
                parts['distill'] = distill.item()
                total = total + distill * config.w_distill
            return total

        loss, grads = value_and_grad(loss_fn, student)
        grads, _ = clip_by_global_norm(grads, config.max_grad_norm)
        student, optimizer = adam_step(student, grads, optimizer)
        losses.append(loss)
        contrast_log.append(parts['contrast'])
        distill_log.append(parts['distill'])

    if losses:
        logger.info(
            f"Embedder trained for {total_steps} steps: loss {losses[0]:.4f} -> {losses[-1]:.4f}"
        )
    return BoundaryTrainResult(student, losses, contrast_log, distill_log)

