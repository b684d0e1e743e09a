"""
Episode encoder: per-step MLP, GRU over time, projection head.

Parameter names live under ``step.``, ``gru.`` and ``proj.`` in one flat
tree so the encoder can be serialized with the shared blob format.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from ..gridworld import FEATURE_DIM, Episode, EpisodeSet
from ..neural import Tensor, gru_forward, gru_hidden_states, mlp_forward, ops, sub_tree, to_tensors
from ..neural.layers import ParamTree, TensorTree, init_gru, init_mlp
from ..utils.errors import EmptyEpisodeError, NonFiniteError

logger = logging.getLogger(__name__)

LATENT_DIM = 8
T_MAX = 256
ENCODE_CHUNK = 64


def init_encoder(rng: np.random.Generator, step_hidden: int = 32, gru_hidden: int = 32,
                 proj_hidden: int = 16, latent_dim: int = LATENT_DIM) -> ParamTree:
    """
    Create encoder parameters.

    Args:
        rng: Generator
        step_hidden: Width of both step-MLP layers
        gru_hidden: GRU state size
        proj_hidden: Hidden width of the projection head
        latent_dim: Output dimension

    Returns:
        Flat parameter tree
    """
    params: ParamTree = {}
    params.update(init_mlp(rng, 'step', [FEATURE_DIM, step_hidden, step_hidden]))
    params.update(init_gru(rng, 'gru', step_hidden, gru_hidden))
    params.update(init_mlp(rng, 'proj', [gru_hidden, proj_hidden, latent_dim]))
    return params


def latent_dim_of(params: Mapping[str, np.ndarray]) -> int:
    depth = 1
    while f"proj.l{depth + 1}.W" in params:
        depth += 1
    return int(params[f"proj.l{depth}.W"].shape[0])


def pad_episodes(episodes: Sequence[Episode], t_max: int = T_MAX) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stack episodes into a zero-padded (B, T, 11) array, truncating at ``t_max``.

    Raises:
        EmptyEpisodeError: If ``episodes`` is empty
    """
    if not episodes:
        raise EmptyEpisodeError("No episodes to encode")
    lengths = np.array([min(e.length, t_max) for e in episodes], dtype=np.int64)
    batch = np.zeros((len(episodes), int(lengths.max()), FEATURE_DIM))
    for i, (episode, length) in enumerate(zip(episodes, lengths)):
        batch[i, :length] = episode.features[:length]
    return batch, lengths


def encoder_forward(tensors: TensorTree, features: np.ndarray, lengths: np.ndarray) -> Tensor:
    """
    Differentiable encoder pass.

    Args:
        tensors: Tensor tree with the encoder entries
        features: Padded array (B, T, 11)
        lengths: Valid length of every row

    Returns:
        Tensor (B, d)
    """
    batch, steps, _ = features.shape
    flat = Tensor(features.reshape(batch * steps, FEATURE_DIM))
    hidden = mlp_forward(tensors, 'step', flat, activation='relu', activate_last=True)
    hidden = ops.reshape(hidden, (batch, steps, -1))
    final = gru_forward(tensors, 'gru', hidden, lengths)
    return mlp_forward(tensors, 'proj', final, activation='relu')


def _frozen(params: Mapping[str, np.ndarray], prefix: str) -> Dict[str, Tensor]:
    return to_tensors({k: v for k, v in params.items() if k.startswith(prefix + '.')},
                      requires_grad=False)


def _step_embeddings(params: Mapping[str, np.ndarray], features: np.ndarray) -> np.ndarray:
    batch, steps, _ = features.shape
    flat = Tensor(features.reshape(batch * steps, FEATURE_DIM))
    hidden = mlp_forward(_frozen(params, 'step'), 'step', flat, activation='relu', activate_last=True)
    return hidden.value.reshape(batch, steps, -1)


def _project(params: Mapping[str, np.ndarray], states: np.ndarray) -> np.ndarray:
    return mlp_forward(_frozen(params, 'proj'), 'proj', Tensor(states), activation='relu').value


def encode_episodes(params: Mapping[str, np.ndarray], episodes: Sequence[Episode],
                    t_max: int = T_MAX) -> np.ndarray:
    """
    Embed a list of episodes without recording gradients.

    Returns:
        Array (N, d)
    """
    out: List[np.ndarray] = []
    tensors = to_tensors(params, requires_grad=False)
    for start in range(0, len(episodes), ENCODE_CHUNK):
        features, lengths = pad_episodes(episodes[start:start + ENCODE_CHUNK], t_max)
        out.append(encoder_forward(tensors, features, lengths).value)
    if not out:
        raise EmptyEpisodeError("No episodes to encode")
    return np.concatenate(out, axis=0)


def encode_episode(params: Mapping[str, np.ndarray], episode: Episode, t_max: int = T_MAX) -> np.ndarray:
    """Latent vector of one episode; only the first ``t_max`` steps are read."""
    return encode_episodes(params, [episode], t_max)[0]


@dataclass
class LatentSummary:
    """Policy-level summary of an episode set in raw latent space."""

    z_mean: np.ndarray
    z_std_ep: np.ndarray
    z_std_time: np.ndarray
    n_episodes: int

    def __post_init__(self):
        for name in ('z_mean', 'z_std_ep', 'z_std_time'):
            value = np.asarray(getattr(self, name), dtype=np.float64)
            if not np.all(np.isfinite(value)):
                raise NonFiniteError(f"Latent summary field {name} is not finite")
            setattr(self, name, value)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'z_mean': self.z_mean.tolist(),
            'z_std_ep': self.z_std_ep.tolist(),
            'z_std_time': self.z_std_time.tolist(),
            'n_episodes': int(self.n_episodes),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'LatentSummary':
        return cls(np.asarray(data['z_mean']), np.asarray(data['z_std_ep']),
                   np.asarray(data['z_std_time']), int(data['n_episodes']))


def summarize_policy(params: Mapping[str, np.ndarray], episodes: EpisodeSet,
                     t_max: int = T_MAX) -> LatentSummary:
    """
    Summarize an episode set.

    ``z_std_time`` averages, over episodes, the per-dimension standard
    deviation of the projection head applied to every GRU hidden state.

    Args:
        params: Encoder parameters
        episodes: Non-empty episode set
        t_max: Truncation length

    Returns:
        LatentSummary

    Raises:
        EmptyEpisodeError: If the set is empty
    """
    items = list(episodes)
    if not items:
        raise EmptyEpisodeError("Cannot summarize an empty episode set")
    z = encode_episodes(params, items, t_max)

    time_stds = []
    gru = sub_tree(params, 'gru')
    for start in range(0, len(items), ENCODE_CHUNK):
        features, lengths = pad_episodes(items[start:start + ENCODE_CHUNK], t_max)
        states, _ = gru_hidden_states(_step_embeddings(params, features), lengths, gru)
        for row, length in enumerate(lengths):
            projected = _project(params, states[row, :length])
            time_stds.append(projected.std(axis=0))

    return LatentSummary(z.mean(axis=0), z.std(axis=0), np.mean(time_stds, axis=0), len(items))
