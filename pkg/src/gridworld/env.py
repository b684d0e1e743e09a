"""
Stateful environment wrapper around the pure transition function.
"""

import logging
from typing import NamedTuple, Optional

import numpy as np

from .dynamics import features, observe, step
from .layout import generate_layout
from .state import GridState
from .task import TaskSpec

logger = logging.getLogger(__name__)


class StepResult(NamedTuple):
    obs: np.ndarray
    reward: float
    done: bool
    feature: np.ndarray


class GridEnv:
    """
    One task instance. ``reset`` rebuilds the layout from the spec seed, or
    from an explicit layout seed for procedurally fresh episodes.
    """

    def __init__(self, spec: TaskSpec):
        self.spec = spec.validate()
        self.state: Optional[GridState] = None
        self.episode_count = 0

    def reset(self, layout_seed: Optional[int] = None) -> np.ndarray:
        spec = self.spec if layout_seed is None else self.spec.with_seed(layout_seed)
        self.state = generate_layout(spec)
        self.episode_count += 1
        return observe(self.state)

    def initial_state(self) -> GridState:
        return generate_layout(self.spec)

    def step(self, action: int) -> StepResult:
        if self.state is None:
            self.reset()
        self.state, reward, done = step(self.state, action, self.spec)
        return StepResult(observe(self.state), reward, done, features(self.state, action, self.spec))

    def observe(self) -> np.ndarray:
        return observe(self.state)


def make_task(spec: TaskSpec) -> GridEnv:
    """
    Create an environment for a spec.

    Raises:
        ConfigurationError: If the spec is invalid
    """
    env = GridEnv(spec)
    env.reset()
    return env
