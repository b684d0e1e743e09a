"""
Transition function, policy observation and behavior features.

``step`` never mutates its input: it copies the state, applies the action
and returns the successor together with the terminal reward.
"""

import logging
from typing import Tuple

import numpy as np

from .constants import (
    CARRY_CHANNEL,
    DIR_TO_VEC,
    FEATURE_DIM,
    N_ACTIONS,
    N_CARRY,
    N_CELL_TYPES,
    N_DIRECTIONS,
    N_MISSIONS,
    OBS_DIM,
    PASSABLE,
    PICKABLE,
    PICKUP_FLAGS,
    VIEW_OFFSETS,
    Action,
    Cell,
    Flag,
    Mission,
)
from .state import GridState
from .task import TaskSpec
from ..utils.errors import UsageError

logger = logging.getLogger(__name__)

_CELL_EYE = np.eye(N_CELL_TYPES)
_MISSION_TARGET = {int(Mission.BALL): int(Cell.BALL), int(Mission.BOX): int(Cell.BOX)}


def success_reward(step_count: int, max_steps: int) -> float:
    """Terminal reward for succeeding at ``step_count``."""
    return 1.0 - 0.9 * (step_count / max_steps)


def front_position(state: GridState) -> Tuple[int, int]:
    dx, dy = DIR_TO_VEC[state.agent_dir]
    return state.agent_pos[0] + dx, state.agent_pos[1] + dy


def _set_flag(state: GridState, flag: Flag) -> None:
    state.flags[flag] = 1


def _apply_action(state: GridState, action: int) -> bool:
    """Mutate ``state`` in place; returns True when the action completes the task."""
    fx, fy = front_position(state)
    front = state.cell(fx, fy)
    family = state.family

    if action == Action.LEFT:
        state.agent_dir = (state.agent_dir - 1) % 4
    elif action == Action.RIGHT:
        state.agent_dir = (state.agent_dir + 1) % 4
    elif action == Action.FORWARD:
        if front in PASSABLE:
            state.agent_pos = (fx, fy)
            if front == Cell.GOAL:
                if family == 'C':
                    return True
                if family == 'B' and state.carried == _MISSION_TARGET[state.mission]:
                    _set_flag(state, Flag.DELIVERED)
                    return True
    elif action == Action.PICKUP:
        if front in PICKABLE and state.carried is None:
            state.carried = front
            state.grid[fy, fx] = Cell.EMPTY
            if front in PICKUP_FLAGS:
                _set_flag(state, PICKUP_FLAGS[front])
            if family == 'D' and front == Cell.BOX:
                return True
            if family == 'E' and front == Cell.BALL:
                return True
    elif action == Action.DROP:
        if state.carried is not None and front == Cell.EMPTY:
            state.grid[fy, fx] = state.carried
            state.carried = None
    elif action == Action.TOGGLE:
        if front == Cell.DOOR_LOCKED and state.carried == Cell.KEY:
            state.grid[fy, fx] = Cell.DOOR_OPEN
            _set_flag(state, Flag.DOOR_OPEN)
        elif front == Cell.DOOR_CLOSED:
            state.grid[fy, fx] = Cell.DOOR_OPEN
            _set_flag(state, Flag.DOOR_OPEN)
        elif front == Cell.DOOR_OPEN:
            state.grid[fy, fx] = Cell.DOOR_CLOSED
        elif front == Cell.BOX and state.hidden_key == (fx, fy):
            state.grid[fy, fx] = Cell.KEY
            state.hidden_key = None
            _set_flag(state, Flag.BOX_TOGGLED)
    elif action == Action.DONE:
        if family == 'A' and front == _MISSION_TARGET.get(state.mission):
            return True
    return False


def step(state: GridState, action: int, spec: TaskSpec) -> Tuple[GridState, float, bool]:
    """
    Advance one step.

    Args:
        state: Current state (left untouched)
        action: Integer in 0..6
        spec: Task spec supplying ``max_steps``

    Returns:
        (next state, reward, done)

    Raises:
        UsageError: If the episode is already done or the action is invalid
    """
    if state.done:
        raise UsageError("step() called on a finished episode; reset the task first")
    if not 0 <= int(action) < N_ACTIONS:
        raise UsageError(f"Action {action} outside 0..{N_ACTIONS - 1}")

    nxt = state.copy()
    nxt.step_count += 1
    succeeded = _apply_action(nxt, int(action))

    reward = 0.0
    if succeeded:
        nxt.success = True
        reward = success_reward(nxt.step_count, spec.max_steps)
    nxt.done = succeeded or nxt.step_count >= spec.max_steps
    return nxt, reward, nxt.done


def features(state: GridState, action: int, spec: TaskSpec) -> np.ndarray:
    """
    Eleven-dimensional behavior feature for one step.

    Args:
        state: State after the step
        action: Action that was taken
        spec: Task spec

    Returns:
        Array (x01, y01, d01, t01, a01, six flags)
    """
    x, y = state.agent_pos
    out = np.empty(FEATURE_DIM)
    out[0] = x / max(spec.width - 1, 1)
    out[1] = y / max(spec.height - 1, 1)
    out[2] = state.agent_dir / 3.0
    out[3] = state.step_count / spec.max_steps
    out[4] = action / (N_ACTIONS - 1)
    np.clip(out[:5], 0.0, 1.0, out=out[:5])
    out[5:] = state.flags
    return out


def observe(state: GridState) -> np.ndarray:
    """
    Egocentric policy observation.

    A 5x5 window ahead of the agent (agent at the bottom middle) one-hot
    encoded over cell types, followed by direction, carried-object and
    mission one-hots.

    Returns:
        Float vector of length OBS_DIM
    """
    offsets = VIEW_OFFSETS[state.agent_dir]
    xs = offsets[:, 0] + state.agent_pos[0]
    ys = offsets[:, 1] + state.agent_pos[1]
    inside = (xs >= 0) & (xs < state.width) & (ys >= 0) & (ys < state.height)
    cells = np.full(xs.shape, int(Cell.WALL), dtype=np.int64)
    cells[inside] = state.grid[ys[inside], xs[inside]]

    obs = np.zeros(OBS_DIM)
    view = _CELL_EYE[cells].ravel()
    n = view.size
    obs[:n] = view
    obs[n + state.agent_dir] = 1.0
    n += N_DIRECTIONS
    obs[n + CARRY_CHANNEL[state.carried]] = 1.0
    n += N_CARRY
    obs[n + min(state.mission, N_MISSIONS - 1)] = 1.0
    return obs
