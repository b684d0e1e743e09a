"""
Procedural layouts for the five task families.

Every layout is a pure function of the TaskSpec: the generator draws from a
stream derived from the spec seed and family, so the same spec always
yields the same initial state.
"""

import logging
from typing import Callable, Dict, List, Tuple

import numpy as np

from .constants import Cell, Mission
from .state import GridState
from .task import TaskSpec
from ..utils.seeding import derive_rng

logger = logging.getLogger(__name__)

Position = Tuple[int, int]


class _Builder:
    """Small helper tracking free cells while objects are placed."""

    def __init__(self, spec: TaskSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.grid = np.zeros((spec.height, spec.width), dtype=np.int8)
        self.reserved = set()

    def free_cells(self, x_lo: int = 0, x_hi: int = None) -> List[Position]:
        x_hi = self.spec.width if x_hi is None else x_hi
        return [
            (x, y)
            for y in range(self.spec.height)
            for x in range(x_lo, x_hi)
            if self.grid[y, x] == Cell.EMPTY and (x, y) not in self.reserved
        ]

    def place(self, cell: Cell, x_lo: int = 0, x_hi: int = None) -> Position:
        cells = self.free_cells(x_lo, x_hi)
        x, y = cells[int(self.rng.integers(len(cells)))]
        self.grid[y, x] = cell
        return x, y

    def reserve(self, x_lo: int = 0, x_hi: int = None) -> Position:
        cells = self.free_cells(x_lo, x_hi)
        pos = cells[int(self.rng.integers(len(cells)))]
        self.reserved.add(pos)
        return pos

    def wall_with_door(self, x_lo: int, x_hi: int, door: Cell) -> Tuple[int, int]:
        """Vertical wall at a column in [x_lo, x_hi] with one door cell."""
        wall_x = int(self.rng.integers(x_lo, x_hi + 1))
        door_y = int(self.rng.integers(self.spec.height))
        self.grid[:, wall_x] = Cell.WALL
        self.grid[door_y, wall_x] = door
        return wall_x, door_y

    def state(self, agent: Position, mission: int, hidden_key: Position = None) -> GridState:
        return GridState(
            family=self.spec.family,
            grid=self.grid,
            agent_pos=agent,
            agent_dir=int(self.rng.integers(4)),
            mission=mission,
            hidden_key=hidden_key,
        )


def _layout_a(b: _Builder) -> GridState:
    """Open room with a ball and a box; the mission names one of them."""
    agent = b.reserve()
    b.place(Cell.BALL)
    b.place(Cell.BOX)
    mission = int(b.rng.integers(2))
    return b.state(agent, mission)


def _layout_b(b: _Builder) -> GridState:
    """Open room with a ball, a box and a delivery cell."""
    agent = b.reserve()
    b.place(Cell.BALL)
    b.place(Cell.BOX)
    b.place(Cell.GOAL)
    mission = int(b.rng.integers(2))
    return b.state(agent, mission)


def _layout_c(b: _Builder) -> GridState:
    """Key in the left room, locked door, goal in the right room."""
    wall_x, _ = b.wall_with_door(1, b.spec.width - 2, Cell.DOOR_LOCKED)
    agent = b.reserve(0, wall_x)
    b.place(Cell.KEY, 0, wall_x)
    b.place(Cell.GOAL, wall_x + 1)
    return b.state(agent, int(Mission.GOAL))


def _layout_d(b: _Builder) -> GridState:
    """Blocker in front of a locked door; key and distractor ball on the agent's side, box beyond."""
    wall_x, door_y = b.wall_with_door(2, b.spec.width - 3, Cell.DOOR_LOCKED)
    b.grid[door_y, wall_x - 1] = Cell.BLOCKER
    agent = b.reserve(0, wall_x)
    b.place(Cell.KEY, 0, wall_x)
    b.place(Cell.BALL, 0, wall_x)
    b.place(Cell.BOX, wall_x + 1)
    return b.state(agent, int(Mission.BOX))


def _layout_e(b: _Builder) -> GridState:
    """Obstructed locked door, key hidden in a box, ball in the far room."""
    wall_x, door_y = b.wall_with_door(2, b.spec.width - 3, Cell.DOOR_LOCKED)
    b.grid[door_y, wall_x - 1] = Cell.BLOCKER
    agent = b.reserve(0, wall_x)
    box = b.place(Cell.BOX, 0, wall_x)
    b.place(Cell.BALL, wall_x + 1)
    return b.state(agent, int(Mission.BALL), hidden_key=box)


LAYOUTS: Dict[str, Callable[[_Builder], GridState]] = {
    'A': _layout_a,
    'B': _layout_b,
    'C': _layout_c,
    'D': _layout_d,
    'E': _layout_e,
}


def generate_layout(spec: TaskSpec) -> GridState:
    """
    Build the initial state for a spec.

    Args:
        spec: Validated task spec

    Returns:
        Fresh GridState
    """
    spec.validate()
    rng = derive_rng(spec.seed, 'layout', spec.family, spec.width, spec.height)
    state = LAYOUTS[spec.family](_Builder(spec, rng))
    logger.debug(f"Generated {spec.family} layout {spec.width}x{spec.height} seed={spec.seed}")
    return state
