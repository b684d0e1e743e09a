"""
Actor-critic policy networks.

Actor and critic are separate tanh MLPs stored in one parameter tree under
the ``actor`` and ``critic`` prefixes. Acting uses a plain numpy forward
pass; training builds the differentiable graph through ``policy_forward``.
"""

import logging
from typing import Mapping, Sequence, Tuple

import numpy as np

from ..gridworld.constants import N_ACTIONS, OBS_DIM
from ..gridworld.evaluation import Policy
from ..neural import Tensor, init_mlp, mlp_forward
from ..neural.layers import ParamTree, TensorTree, mlp_depth

logger = logging.getLogger(__name__)

DEFAULT_HIDDEN = (64, 64)


def init_policy(rng: np.random.Generator,
                obs_dim: int = OBS_DIM,
                n_actions: int = N_ACTIONS,
                hidden: Sequence[int] = DEFAULT_HIDDEN) -> ParamTree:
    """
    Fresh actor/critic parameters.

    The actor's output layer is scaled down so the initial policy is close
    to uniform.

    Args:
        rng: Generator
        obs_dim: Observation width
        n_actions: Number of discrete actions
        hidden: Hidden layer widths shared by both networks

    Returns:
        Parameter tree
    """
    params = init_mlp(rng, 'actor', [obs_dim, *hidden, n_actions], final_scale=0.01)
    params.update(init_mlp(rng, 'critic', [obs_dim, *hidden, 1]))
    return params


def policy_forward(params: TensorTree, obs: Tensor) -> Tuple[Tensor, Tensor]:
    """Differentiable (logits (N, A), values (N, 1))."""
    return mlp_forward(params, 'actor', obs), mlp_forward(params, 'critic', obs)


def _numpy_mlp(params: Mapping[str, np.ndarray], prefix: str, x: np.ndarray) -> np.ndarray:
    depth = mlp_depth(params, prefix)
    for i in range(1, depth + 1):
        x = x @ params[f"{prefix}.l{i}.W"].T + params[f"{prefix}.l{i}.b"]
        if i < depth:
            x = np.tanh(x)
    return x


def log_probs(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def sample_actions(logp: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling, one uniform draw per row."""
    cdf = np.cumsum(np.exp(logp), axis=1)
    u = rng.random(logp.shape[0])[:, None] * cdf[:, -1:]
    return np.minimum((u > cdf).sum(axis=1), logp.shape[1] - 1)


def act(params: Mapping[str, np.ndarray], obs: np.ndarray,
        rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sample actions for a batch of observations.

    Returns:
        (actions, log-probabilities of the chosen actions, values)
    """
    logp = log_probs(_numpy_mlp(params, 'actor', obs))
    actions = sample_actions(logp, rng)
    values = _numpy_mlp(params, 'critic', obs)[:, 0]
    return actions, logp[np.arange(len(actions)), actions], values


def values_of(params: Mapping[str, np.ndarray], obs: np.ndarray) -> np.ndarray:
    return _numpy_mlp(params, 'critic', obs)[:, 0]


def make_policy(params: Mapping[str, np.ndarray]) -> Policy:
    """Wrap parameters as a stochastic policy callable for evaluation."""
    frozen = {name: np.array(value) for name, value in params.items()}

    def policy(obs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return sample_actions(log_probs(_numpy_mlp(frozen, 'actor', obs)), rng)

    return policy
