"""
Mutable-by-copy gridworld state.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .constants import DOORS, N_FLAGS, Cell


@dataclass
class GridState:
    """
    Full simulator state.

    ``grid`` is indexed ``[y, x]``. ``carried`` holds a Cell value or None.
    ``hidden_key`` marks the box that turns into a key when toggled.
    """

    family: str
    grid: np.ndarray
    agent_pos: Tuple[int, int]
    agent_dir: int
    mission: int
    carried: Optional[int] = None
    step_count: int = 0
    flags: np.ndarray = field(default_factory=lambda: np.zeros(N_FLAGS, dtype=np.int8))
    hidden_key: Optional[Tuple[int, int]] = None
    done: bool = False
    success: bool = False

    @property
    def width(self) -> int:
        return int(self.grid.shape[1])

    @property
    def height(self) -> int:
        return int(self.grid.shape[0])

    def cell(self, x: int, y: int) -> int:
        """Cell value, with everything outside the area reading as wall."""
        if 0 <= x < self.width and 0 <= y < self.height:
            return int(self.grid[y, x])
        return int(Cell.WALL)

    def copy(self) -> 'GridState':
        return GridState(
            family=self.family,
            grid=self.grid.copy(),
            agent_pos=self.agent_pos,
            agent_dir=self.agent_dir,
            mission=self.mission,
            carried=self.carried,
            step_count=self.step_count,
            flags=self.flags.copy(),
            hidden_key=self.hidden_key,
            done=self.done,
            success=self.success,
        )

    def door_states(self) -> Tuple[int, ...]:
        values = self.grid[np.isin(self.grid, [int(d) for d in DOORS])]
        return tuple(int(v) for v in values)

    def state_key(self) -> int:
        """Hash of position, heading, carried object, doors and flags."""
        return hash((
            self.agent_pos,
            self.agent_dir,
            -1 if self.carried is None else int(self.carried),
            self.door_states(),
            tuple(int(f) for f in self.flags),
        ))

    def same_as(self, other: 'GridState') -> bool:
        return (
            self.family == other.family
            and np.array_equal(self.grid, other.grid)
            and self.agent_pos == other.agent_pos
            and self.agent_dir == other.agent_dir
            and self.mission == other.mission
            and self.carried == other.carried
            and self.step_count == other.step_count
            and np.array_equal(self.flags, other.flags)
            and self.hidden_key == other.hidden_key
            and self.done == other.done
            and self.success == other.success
        )
