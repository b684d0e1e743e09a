"""
Clipped-surrogate PPO with GAE over a set of parallel gridworld instances.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .baselines import l2init_term
from .intrinsic import EpisodicCounter, intrinsic_bonus
from .policy import act, policy_forward, values_of
from ..gridworld import GridState, TaskSpec, generate_layout, observe, step
from ..neural import Tensor, ops
from ..neural.optim import DEFAULT_CLIP_NORM, OptimizerState, adam_step, clip_by_global_norm
from ..neural.params import ParamTree, value_and_grad
from ..utils.errors import ConfigurationError, InsufficientDataError
from ..utils.seeding import derive_rng

logger = logging.getLogger(__name__)


@dataclass
class PPOConfig:
    """
    PPO hyperparameters and the per-task training budget.
    """

    total_steps: int = 300_000
    horizon: int = 2048
    n_envs: int = 8
    minibatch_size: int = 256
    epochs: int = 4
    clip_eps: float = 0.2
    gamma: float = 0.99
    gae_lambda: float = 0.95
    learning_rate: float = 3e-4
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    max_grad_norm: float = DEFAULT_CLIP_NORM
    intrinsic_beta: float = 0.005
    intrinsic_enabled: bool = False
    eval_every: int = 10_000
    eval_episodes: int = 20
    hidden: Tuple[int, ...] = field(default=(64, 64))

    def validate(self) -> 'PPOConfig':
        if self.total_steps < 0:
            raise ConfigurationError("PPO step budget must be non-negative")
        for name in ('horizon', 'n_envs', 'minibatch_size', 'epochs', 'eval_every', 'eval_episodes'):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"PPO {name} must be positive")
        if self.horizon < self.n_envs:
            raise ConfigurationError("PPO horizon must cover at least one step per environment")
        if not 0 < self.clip_eps < 1:
            raise ConfigurationError(f"clip eps must lie in (0, 1), got {self.clip_eps}")
        if not 0 < self.gamma <= 1:
            raise ConfigurationError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0 <= self.gae_lambda <= 1:
            raise ConfigurationError(f"GAE lambda must lie in [0, 1], got {self.gae_lambda}")
        if self.learning_rate <= 0:
            raise ConfigurationError("Learning rate must be positive")
        if self.intrinsic_beta < 0:
            raise ConfigurationError("Intrinsic beta must be non-negative")
        return self

    @property
    def steps_per_env(self) -> int:
        return self.horizon // self.n_envs

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['hidden'] = list(self.hidden)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'PPOConfig':
        data = dict(data)
        if 'hidden' in data:
            data['hidden'] = tuple(data['hidden'])
        return cls(**data).validate()


class RolloutBatch(NamedTuple):
    obs: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    values: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray

    def __len__(self) -> int:
        return int(self.actions.shape[0])


class PPOUpdate(NamedTuple):
    params: ParamTree
    optimizer: OptimizerState
    diagnostics: Dict[str, float]


def compute_gae(rewards: np.ndarray, values: np.ndarray, dones: np.ndarray,
                last_values: np.ndarray, gamma: float, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Generalized advantage estimation over (T, n_envs) arrays.

    ``dones[t]`` marks that the episode ended after step ``t``; no value is
    bootstrapped across that boundary.

    Returns:
        (advantages, returns) with the input shape
    """
    horizon = rewards.shape[0]
    advantages = np.zeros_like(rewards)
    gae = np.zeros(rewards.shape[1:])
    for t in range(horizon - 1, -1, -1):
        next_values = last_values if t == horizon - 1 else values[t + 1]
        not_done = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_values * not_done - values[t]
        gae = delta + gamma * lam * not_done * gae
        advantages[t] = gae
    return advantages, advantages + values


def ppo_loss(tensors: Mapping[str, Tensor], batch: RolloutBatch, advantages: np.ndarray,
             config: PPOConfig, l2_anchor: Optional[Mapping[str, np.ndarray]] = None,
             l2_lambda: float = 0.0) -> Tuple[Tensor, Dict[str, Tensor]]:
    """
    Total PPO loss for one minibatch.

    ``-surrogate + value_coef * value_mse - entropy_coef * entropy``, plus the
    L2 pull toward ``l2_anchor`` when given.
    """
    logits, values = policy_forward(tensors, Tensor(batch.obs))
    logp_all = ops.log_softmax(logits)
    ratio = ops.exp(ops.pick(logp_all, batch.actions) - batch.log_probs)
    clipped = ops.clip(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps)
    surrogate = ops.mean(ops.minimum(ratio * advantages, clipped * advantages))
    value_loss = ops.mean(ops.square(ops.reshape(values, (-1,)) - batch.returns))
    entropy = -ops.mean(ops.sum(ops.exp(logp_all) * logp_all, axis=1))

    loss = -surrogate + value_loss * config.value_coef - entropy * config.entropy_coef
    if l2_anchor is not None and l2_lambda > 0:
        loss = loss + l2init_term(tensors, l2_anchor, l2_lambda)
    return loss, {'surrogate': surrogate, 'value_loss': value_loss, 'entropy': entropy}


def ppo_update(params: Mapping[str, np.ndarray], batch: RolloutBatch, config: PPOConfig,
               optimizer: OptimizerState, rng: np.random.Generator,
               l2_anchor: Optional[Mapping[str, np.ndarray]] = None,
               l2_lambda: float = 0.0) -> PPOUpdate:
    """
    Run ``config.epochs`` passes of minibatch Adam over one rollout batch.

    Args:
        params: Current policy parameters
        batch: Rollout with GAE advantages and returns
        config: PPO hyperparameters
        optimizer: Adam state
        rng: Generator for minibatch shuffling
        l2_anchor: Parameters of the L2 pull (L2Init baseline)
        l2_lambda: Strength of the L2 pull

    Returns:
        PPOUpdate(params, optimizer, diagnostics)

    Raises:
        InsufficientDataError: If the batch is empty
    """
    n = len(batch)
    if n == 0:
        raise InsufficientDataError("PPO update received an empty rollout batch")

    advantages = batch.advantages
    if n > 1:
        advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)

    stats = {'loss': [], 'surrogate': [], 'value_loss': [], 'entropy': [], 'grad_norm': []}
    size = min(config.minibatch_size, n)
    params = dict(params)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, size):
            idx = order[start:start + size]
            mini = RolloutBatch(*(field_values[idx] for field_values in batch))
            mini_adv = advantages[idx]
            parts = {}

            def loss_fn(tensors):
                loss, pieces = ppo_loss(tensors, mini, mini_adv, config, l2_anchor, l2_lambda)
                parts.update(pieces)
                return loss

            loss_value, grads = value_and_grad(loss_fn, params)
            grads, norm = clip_by_global_norm(grads, config.max_grad_norm)
            params, optimizer = adam_step(params, grads, optimizer)
            stats['loss'].append(loss_value)
            stats['grad_norm'].append(norm)
            for key, tensor in parts.items():
                stats[key].append(tensor.item())

    diagnostics = {key: float(np.mean(values)) for key, values in stats.items() if values}
    return PPOUpdate(params, optimizer, diagnostics)


class RolloutCollector:
    """
    Steps ``n_envs`` task instances with the current policy.

    Episodes continue across rollouts; every reset draws a fresh layout seed
    from the collector's stream so training sees procedurally varied maps.
    """

    def __init__(self, spec: TaskSpec, config: PPOConfig, seed: int, label: str):
        self.spec = spec
        self.config = config
        self.layout_rng = derive_rng(seed, 'ppo-layouts', label)
        self.action_rng = derive_rng(seed, 'ppo-actions', label)
        self.states: List[GridState] = [self._fresh_state() for _ in range(config.n_envs)]
        self.counters = [EpisodicCounter() for _ in range(config.n_envs)]
        self.episodes_finished = 0
        self.successes = 0

    def _fresh_state(self) -> GridState:
        seed = int(self.layout_rng.integers(2 ** 63))
        return generate_layout(self.spec.with_seed(seed))

    def collect(self, params: Mapping[str, np.ndarray]) -> Tuple[RolloutBatch, int]:
        """
        Gather one horizon of experience.

        Returns:
            (batch with advantages, environment steps consumed)
        """
        cfg = self.config
        horizon, n_envs = cfg.steps_per_env, cfg.n_envs
        obs_buf = np.zeros((horizon, n_envs, len(observe(self.states[0]))))
        act_buf = np.zeros((horizon, n_envs), dtype=np.int64)
        logp_buf = np.zeros((horizon, n_envs))
        val_buf = np.zeros((horizon, n_envs))
        rew_buf = np.zeros((horizon, n_envs))
        done_buf = np.zeros((horizon, n_envs))

        for t in range(horizon):
            obs = np.stack([observe(s) for s in self.states])
            actions, logp, values = act(params, obs, self.action_rng)
            obs_buf[t], act_buf[t], logp_buf[t], val_buf[t] = obs, actions, logp, values
            for i in range(n_envs):
                state, reward, done = step(self.states[i], int(actions[i]), self.spec)
                if cfg.intrinsic_enabled and cfg.intrinsic_beta > 0:
                    key = state.state_key()
                    self.counters[i].increment(key)
                    reward += intrinsic_bonus(self.counters[i], key, cfg.intrinsic_beta)
                rew_buf[t, i] = reward
                if done:
                    done_buf[t, i] = 1.0
                    self.episodes_finished += 1
                    self.successes += int(state.success)
                    self.counters[i].reset()
                    state = self._fresh_state()
                self.states[i] = state

        last_values = values_of(params, np.stack([observe(s) for s in self.states]))
        advantages, returns = compute_gae(rew_buf, val_buf, done_buf, last_values,
                                          cfg.gamma, cfg.gae_lambda)
        def flat(a):
            return a.reshape(horizon * n_envs, *a.shape[2:])

        batch = RolloutBatch(flat(obs_buf), flat(act_buf), flat(logp_buf), flat(val_buf),
                             flat(advantages), flat(returns))
        return batch, horizon * n_envs
