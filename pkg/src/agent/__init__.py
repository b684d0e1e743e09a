"""
Actor-critic agent module.
Provides PPO training with evaluation checkpoints, the episodic exploration
bonus and the single-model continual-learning transforms.
"""

from .policy import init_policy, policy_forward, act, make_policy, sample_actions
from .intrinsic import EpisodicCounter, intrinsic_bonus
from .baselines import (
    l2init_penalty,
    l2init_term,
    shrink_and_perturb,
    DEFAULT_L2INIT_LAMBDA,
    DEFAULT_SHRINK_ALPHA,
    DEFAULT_PERTURB_SCALE,
)
from .ppo import PPOConfig, RolloutBatch, PPOUpdate, RolloutCollector, compute_gae, ppo_loss, ppo_update
from .trainer import TrainTrace, TrainResult, train_task

__all__ = [
    # Policy
    'init_policy',
    'policy_forward',
    'act',
    'make_policy',
    'sample_actions',

    # Exploration
    'EpisodicCounter',
    'intrinsic_bonus',

    # Baseline transforms
    'l2init_penalty',
    'l2init_term',
    'shrink_and_perturb',
    'DEFAULT_L2INIT_LAMBDA',
    'DEFAULT_SHRINK_ALPHA',
    'DEFAULT_PERTURB_SCALE',

    # PPO
    'PPOConfig',
    'RolloutBatch',
    'PPOUpdate',
    'RolloutCollector',
    'compute_gae',
    'ppo_loss',
    'ppo_update',

    # Training
    'TrainTrace',
    'TrainResult',
    'train_task',
]

__version__ = '1.0.0'
