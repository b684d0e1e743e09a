"""
Versioned embedding state: encoder parameters plus the fitted normalizer.
"""

import logging
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .encoder import LatentSummary, T_MAX, encode_episodes, init_encoder, summarize_policy
from .normalizer import Normalizer, normalize
from .training import EmbedderConfig
from ..gridworld import EpisodeSet
from ..neural import copy_tree, load_metadata, load_params, save_params
from ..neural.layers import ParamTree
from ..utils.errors import ArtifactError, UsageError
from ..utils.seeding import derive_rng

logger = logging.getLogger(__name__)


@dataclass
class EmbeddingState:
    """
    Encoder, optional normalizer and the embedding version.

    The version moves only at boundary maintenance; a bootstrap normalizer
    fitted before the first maintenance keeps version 0.
    """

    encoder: ParamTree
    normalizer: Optional[Normalizer] = None
    version: int = 0
    t_max: int = T_MAX

    def copy(self) -> 'EmbeddingState':
        normalizer = None
        if self.normalizer is not None:
            normalizer = Normalizer.from_dict(self.normalizer.to_dict())
        return EmbeddingState(copy_tree(self.encoder), normalizer, self.version, self.t_max)

    def raw_mean(self, episodes: EpisodeSet) -> np.ndarray:
        return encode_episodes(self.encoder, list(episodes), self.t_max).mean(axis=0)

    def descriptor(self, episodes: EpisodeSet) -> np.ndarray:
        """Normalized mean latent of an episode set."""
        if self.normalizer is None:
            raise UsageError("Embedding state has no fitted normalizer")
        return normalize(self.raw_mean(episodes), self.normalizer)

    def summarize(self, episodes: EpisodeSet) -> LatentSummary:
        return summarize_policy(self.encoder, episodes, self.t_max)


def init_embedding_state(seed: int, config: Optional[EmbedderConfig] = None) -> EmbeddingState:
    config = config or EmbedderConfig()
    rng = derive_rng(seed, 'encoder-init')
    encoder = init_encoder(rng, config.step_hidden, config.gru_hidden, config.proj_hidden, config.latent_dim)
    return EmbeddingState(encoder, None, 0, config.t_max)


def state_path(root: str, version: int) -> str:
    return os.path.join(root, 'embedding', f"state-v{version}")


def save_embedding_state(root: str, state: EmbeddingState) -> str:
    """
    Write ``embedding/state-v<t>.tlpb`` with its sidecar under ``root``.

    Returns:
        Blob path
    """
    metadata = {
        'version': int(state.version),
        't_max': int(state.t_max),
        'normalizer': state.normalizer.to_dict() if state.normalizer is not None else None,
    }
    path = save_params(state_path(root, state.version), state.encoder, metadata)
    logger.info(f"Saved embedding state v{state.version} to {path}")
    return path


def load_embedding_state(path: str) -> EmbeddingState:
    """
    Read a state written by ``save_embedding_state``.

    Raises:
        ArtifactError: If the blob or sidecar is missing or inconsistent
    """
    encoder = load_params(path)
    metadata = load_metadata(path)
    if 'version' not in metadata:
        raise ArtifactError("Embedding sidecar lacks a version", path)
    normalizer = None
    if metadata.get('normalizer') is not None:
        normalizer = Normalizer.from_dict(metadata['normalizer'])
    return EmbeddingState(encoder, normalizer, int(metadata['version']), int(metadata.get('t_max', T_MAX)))
