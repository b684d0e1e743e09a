"""
Cell types, actions, directions and layout constants for the gridworld.
"""

from enum import IntEnum
from typing import Dict, Tuple

import numpy as np


class Cell(IntEnum):
    """Cell contents; the integer value is the observation channel."""
    EMPTY = 0
    WALL = 1
    KEY = 2
    BALL = 3
    BOX = 4
    DOOR_LOCKED = 5
    DOOR_CLOSED = 6
    DOOR_OPEN = 7
    GOAL = 8
    BLOCKER = 9


class Action(IntEnum):
    LEFT = 0
    RIGHT = 1
    FORWARD = 2
    PICKUP = 3
    DROP = 4
    TOGGLE = 5
    DONE = 6


class Flag(IntEnum):
    """Index of each sticky event flag in the state's flag vector."""
    HAS_KEY = 0
    HAS_BALL = 1
    HAS_BOX = 2
    DOOR_OPEN = 3
    BOX_TOGGLED = 4
    DELIVERED = 5


class Mission(IntEnum):
    BALL = 0
    BOX = 1
    GOAL = 2
    KEY = 3


FAMILIES = ('A', 'B', 'C', 'D', 'E')
VARIANTS = ('standard', 'small')

N_ACTIONS = len(Action)
N_CELL_TYPES = len(Cell)
N_FLAGS = len(Flag)
N_DIRECTIONS = 4
N_MISSIONS = len(Mission)
FEATURE_DIM = 5 + N_FLAGS

# Direction 0 faces +x, 1 faces +y (down), 2 faces -x, 3 faces -y.
DIR_TO_VEC: Dict[int, Tuple[int, int]] = {
    0: (1, 0),
    1: (0, 1),
    2: (-1, 0),
    3: (0, -1),
}

PASSABLE = frozenset({Cell.EMPTY, Cell.GOAL, Cell.DOOR_OPEN})
PICKABLE = frozenset({Cell.KEY, Cell.BALL, Cell.BOX, Cell.BLOCKER})
DOORS = frozenset({Cell.DOOR_LOCKED, Cell.DOOR_CLOSED, Cell.DOOR_OPEN})

PICKUP_FLAGS = {
    Cell.KEY: Flag.HAS_KEY,
    Cell.BALL: Flag.HAS_BALL,
    Cell.BOX: Flag.HAS_BOX,
}

# Carried-object channels: none, key, ball, box, blocker
CARRY_CHANNEL = {
    None: 0,
    Cell.KEY: 1,
    Cell.BALL: 2,
    Cell.BOX: 3,
    Cell.BLOCKER: 4,
}
N_CARRY = 5

VIEW_SIZE = 5
OBS_DIM = VIEW_SIZE * VIEW_SIZE * N_CELL_TYPES + N_DIRECTIONS + N_CARRY + N_MISSIONS

STANDARD_SIZES: Dict[str, Tuple[int, int]] = {
    'A': (8, 8),
    'B': (6, 6),
    'C': (8, 8),
    'D': (10, 6),
    'E': (12, 6),
}

# Families whose layout splits the grid into two rooms need room on both sides.
MIN_TWO_ROOM_WIDTH = {'C': 4, 'D': 5, 'E': 5}


def _view_offsets() -> np.ndarray:
    """
    World offsets of the 5x5 forward view for each direction.

    Row 0 is farthest ahead, the agent sits in the bottom row, middle column.

    Returns:
        Array of shape (4, 25, 2) with (dx, dy) per view cell
    """
    offsets = np.zeros((N_DIRECTIONS, VIEW_SIZE * VIEW_SIZE, 2), dtype=np.int64)
    for d, (fx, fy) in DIR_TO_VEC.items():
        rx, ry = -fy, fx
        k = 0
        for row in range(VIEW_SIZE):
            ahead = VIEW_SIZE - 1 - row
            for col in range(VIEW_SIZE):
                side = col - VIEW_SIZE // 2
                offsets[d, k] = (ahead * fx + side * rx, ahead * fy + side * ry)
                k += 1
    return offsets


VIEW_OFFSETS = _view_offsets()
