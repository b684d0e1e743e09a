"""
Task specifications for the five gridworld families.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from .constants import FAMILIES, MIN_TWO_ROOM_WIDTH, STANDARD_SIZES, VARIANTS
from ..utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TaskSpec:
    """
    Everything needed to build one task instance.

    Attributes:
        family: One of A-E
        width: Navigable width W in cells
        height: Navigable height H in cells
        max_steps: Episode step limit
        seed: Layout seed
        variant: ``standard`` or ``small``
    """

    family: str
    width: int
    height: int
    max_steps: int
    seed: int = 0
    variant: str = 'standard'

    def validate(self) -> 'TaskSpec':
        """
        Check the spec's invariants.

        Returns:
            self, for chaining

        Raises:
            ConfigurationError: On unknown family/variant or bad dimensions
        """
        if self.family not in FAMILIES:
            raise ConfigurationError(f"Unknown task family {self.family!r}")
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"Unknown task variant {self.variant!r}")
        if self.width < 4 or self.height < 4:
            raise ConfigurationError(
                f"Grid must be at least 4x4, got {self.width}x{self.height}"
            )
        min_width = MIN_TWO_ROOM_WIDTH.get(self.family, 4)
        if self.width < min_width:
            raise ConfigurationError(
                f"Family {self.family} needs width >= {min_width}, got {self.width}"
            )
        if self.max_steps < self.width * self.height:
            raise ConfigurationError(
                f"max_steps {self.max_steps} is below W*H = {self.width * self.height}"
            )
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigurationError(f"Seed must be an unsigned 64-bit integer, got {self.seed}")
        return self

    def with_seed(self, seed: int) -> 'TaskSpec':
        return TaskSpec(self.family, self.width, self.height, self.max_steps, seed, self.variant)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TaskSpec':
        return cls(**data).validate()


def standard_spec(family: str, seed: int = 0, variant: str = 'standard',
                  max_steps: Optional[int] = None) -> TaskSpec:
    """
    Build the default spec for a family.

    The small variant halves both dimensions (at least 4) and halves the
    standard step limit.

    Args:
        family: One of A-E
        seed: Layout seed
        variant: ``standard`` or ``small``
        max_steps: Override for the step limit

    Returns:
        Validated TaskSpec
    """
    if family not in STANDARD_SIZES:
        raise ConfigurationError(f"Unknown task family {family!r}")
    width, height = STANDARD_SIZES[family]
    default_steps = 4 * width * height
    if variant == 'small':
        width, height = max(4, width // 2), max(4, height // 2)
        default_steps = default_steps // 2
    elif variant != 'standard':
        raise ConfigurationError(f"Unknown task variant {variant!r}")
    spec = TaskSpec(family, width, height, max_steps or default_steps, seed, variant)
    return spec.validate()
