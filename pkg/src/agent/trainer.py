"""
Per-task PPO training loop with evaluation checkpoints.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Mapping, Optional, Tuple

import numpy as np

from .policy import make_policy
from .ppo import PPOConfig, RolloutCollector, ppo_update
from ..gridworld import EpisodeSet, TaskSpec, evaluate_policy
from ..neural.optim import OptimizerState, init_optimizer
from ..neural.params import ParamTree, copy_tree
from ..utils.errors import UsageError
from ..utils.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)

# Receives every checkpoint's evaluation episodes (pre, intermediate and post).
BanksHook = Callable[[EpisodeSet], None]
# Receives (phase, env_steps, sr, mean_reward) for the event log.
CheckpointHook = Callable[[str, int, float, float], None]


@dataclass
class TrainTrace:
    """Evaluation checkpoints as (env steps, SR, mean reward)."""

    checkpoints: List[Tuple[int, float, float]] = field(default_factory=list)

    def add(self, env_steps: int, sr: float, mean_reward: float) -> None:
        if self.checkpoints and env_steps <= self.checkpoints[-1][0]:
            raise UsageError(f"Checkpoint steps must increase, got {env_steps}")
        self.checkpoints.append((int(env_steps), float(sr), float(mean_reward)))

    @property
    def steps(self) -> List[int]:
        return [c[0] for c in self.checkpoints]

    @property
    def srs(self) -> List[float]:
        return [c[1] for c in self.checkpoints]

    @property
    def final_sr(self) -> float:
        return self.checkpoints[-1][1] if self.checkpoints else 0.0

    def to_list(self) -> List[List[float]]:
        return [list(c) for c in self.checkpoints]

    @classmethod
    def from_list(cls, rows) -> 'TrainTrace':
        trace = cls()
        for env_steps, sr, reward in rows:
            trace.add(int(env_steps), sr, reward)
        return trace


@dataclass
class TrainResult:
    params: ParamTree
    trace: TrainTrace
    episode_sets: List[EpisodeSet]
    optimizer: OptimizerState
    env_steps: int
    eval_steps: int
    diagnostics: List[dict] = field(default_factory=list)

    @property
    def final_episodes(self) -> EpisodeSet:
        return self.episode_sets[-1]


def train_task(spec: TaskSpec,
               init_params: Mapping[str, np.ndarray],
               config: PPOConfig,
               seed: int,
               tag: str,
               banks_hook: Optional[BanksHook] = None,
               checkpoint_hook: Optional[CheckpointHook] = None,
               optimizer: Optional[OptimizerState] = None,
               l2_anchor: Optional[Mapping[str, np.ndarray]] = None,
               l2_lambda: float = 0.0,
               phase: str = 'train') -> TrainResult:
    """
    Train a policy on one task for ``config.total_steps`` environment steps.

    An evaluation checkpoint is recorded before any update, then whenever the
    step count crosses a multiple of ``config.eval_every``, and once more at
    the end. Every checkpoint's episode set is passed to ``banks_hook``.

    Args:
        spec: Task to train on
        init_params: Starting parameters (left untouched)
        config: PPO configuration, including the step budget
        seed: Run seed
        tag: Task tag used to label random streams and episode sets
        banks_hook: Receives checkpoint episode sets
        checkpoint_hook: Receives checkpoint summaries
        optimizer: Existing optimizer state to continue; fresh when None
        l2_anchor: Parameters of the L2 pull (L2Init baseline)
        l2_lambda: Strength of the L2 pull
        phase: Label passed to ``checkpoint_hook`` (``train`` or ``probe``)

    Returns:
        TrainResult
    """
    config.validate()
    params = copy_tree(init_params)
    if optimizer is None:
        optimizer = init_optimizer(params, lr=config.learning_rate)
    trace = TrainTrace()
    episode_sets: List[EpisodeSet] = []
    eval_steps = 0

    def checkpoint(env_steps: int) -> None:
        nonlocal eval_steps
        result = evaluate_policy(make_policy(params), spec, config.eval_episodes,
                                 seed=derive_seed(seed, 'checkpoint-eval', tag, env_steps), tag=tag)
        eval_steps += result.env_steps
        trace.add(env_steps, result.sr, result.mean_reward)
        episode_sets.append(result.episodes)
        if banks_hook is not None:
            banks_hook(result.episodes)
        if checkpoint_hook is not None:
            checkpoint_hook(phase, env_steps, result.sr, result.mean_reward)
        logger.debug(f"[{tag}] {phase} checkpoint at {env_steps} steps: SR={result.sr:.3f}")

    checkpoint(0)
    env_steps = 0
    diagnostics = []
    if config.total_steps > 0:
        collector = RolloutCollector(spec, config, seed, f"{phase}-{tag}")
        update_rng = derive_rng(seed, 'ppo-minibatches', phase, tag)
        next_eval = config.eval_every
        while env_steps < config.total_steps:
            batch, consumed = collector.collect(params)
            env_steps += consumed
            update = ppo_update(params, batch, config, optimizer, update_rng, l2_anchor, l2_lambda)
            params, optimizer = update.params, update.optimizer
            diagnostics.append(update.diagnostics)
            if env_steps >= next_eval:
                checkpoint(env_steps)
                while next_eval <= env_steps:
                    next_eval += config.eval_every
        if trace.steps[-1] != env_steps:
            checkpoint(env_steps)

    logger.info(
        f"[{tag}] {phase} finished: {env_steps} env steps, final SR={trace.final_sr:.3f}"
    )
    return TrainResult(params, trace, episode_sets, optimizer, env_steps, eval_steps, diagnostics)
