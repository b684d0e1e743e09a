"""
Shared behavior-embedding module.
Provides the episode encoder, policy summaries, contrastive training with
anchor distillation, and the robust descriptor normalizer.
"""

from .encoder import (
    LATENT_DIM,
    T_MAX,
    LatentSummary,
    init_encoder,
    encoder_forward,
    encode_episode,
    encode_episodes,
    pad_episodes,
    summarize_policy,
)
from .augment import AugmentConfig, augment, crop_bounds
from .losses import contrastive_loss, distill_loss, DEFAULT_TEMPERATURE, DEFAULT_LAMBDA_NORM
from .normalizer import Normalizer, SIGMA_MIN, fit_normalizer, mean_descriptors, normalize, robust_fit
from .training import EmbedderConfig, BoundaryTrainResult, boundary_train
from .state import (
    EmbeddingState,
    init_embedding_state,
    save_embedding_state,
    load_embedding_state,
    state_path,
)

__all__ = [
    # Encoder
    'LATENT_DIM',
    'T_MAX',
    'LatentSummary',
    'init_encoder',
    'encoder_forward',
    'encode_episode',
    'encode_episodes',
    'pad_episodes',
    'summarize_policy',

    # Views
    'AugmentConfig',
    'augment',
    'crop_bounds',

    # Losses
    'contrastive_loss',
    'distill_loss',
    'DEFAULT_TEMPERATURE',
    'DEFAULT_LAMBDA_NORM',

    # Normalizer
    'Normalizer',
    'SIGMA_MIN',
    'fit_normalizer',
    'mean_descriptors',
    'normalize',
    'robust_fit',

    # Training
    'EmbedderConfig',
    'BoundaryTrainResult',
    'boundary_train',

    # State
    'EmbeddingState',
    'init_embedding_state',
    'save_embedding_state',
    'load_embedding_state',
    'state_path',
]

__version__ = '1.0.0'
