"""
Desk-scale gridworld tasks: five families of increasing difficulty, a pure
transition function, egocentric observations, behavior features and
episode evaluation.
"""

from .constants import (
    Cell,
    Action,
    Flag,
    Mission,
    FAMILIES,
    N_ACTIONS,
    FEATURE_DIM,
    OBS_DIM,
    STANDARD_SIZES,
)
from .task import TaskSpec, standard_spec
from .state import GridState
from .layout import generate_layout
from .dynamics import step, features, observe, success_reward
from .env import GridEnv, StepResult, make_task
from .episodes import Episode, EpisodeSet, save_episodes, load_episodes
from .evaluation import Evaluation, Policy, evaluate_policy, random_policy, episode_seed

__all__ = [
    # Constants
    'Cell',
    'Action',
    'Flag',
    'Mission',
    'FAMILIES',
    'N_ACTIONS',
    'FEATURE_DIM',
    'OBS_DIM',
    'STANDARD_SIZES',

    # Tasks and state
    'TaskSpec',
    'standard_spec',
    'GridState',
    'generate_layout',

    # Dynamics
    'step',
    'features',
    'observe',
    'success_reward',
    'GridEnv',
    'StepResult',
    'make_task',

    # Episodes
    'Episode',
    'EpisodeSet',
    'save_episodes',
    'load_episodes',

    # Evaluation
    'Evaluation',
    'Policy',
    'evaluate_policy',
    'random_policy',
    'episode_seed',
]

__version__ = '1.0.0'
