"""
Task orderings.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

from ..utils.errors import ConfigurationError
from ..utils.tags import parse_tag

CURRICULA = {
    'main': ['A', 'B', 'C', 'D', 'E', "A'", "B'", "C'", "D'", "E'"],
    'anti': ['E', 'D', 'C', 'B', 'A', "E'", "D'", "C'", "B'", "A'"],
    'scrambled': ['C', 'A', 'E', 'B', 'D', "C'", "A'", "E'", "B'", "D'"],
    'smoke': ['A', 'B', "A'"],
}


@dataclass(frozen=True)
class CurriculumSpec:
    name: str
    visits: tuple

    def __iter__(self):
        return iter(self.visits)

    def __len__(self) -> int:
        return len(self.visits)

    def validate(self) -> 'CurriculumSpec':
        """
        Raises:
            MalformedTagError: If a tag is outside ``[A-E]'?``
            ConfigurationError: If a revisit comes before its first visit
        """
        if not self.visits:
            raise ConfigurationError(f"Curriculum {self.name!r} is empty")
        seen = set()
        for tag in self.visits:
            base, revisit = parse_tag(tag)
            if revisit and base not in seen:
                raise ConfigurationError(f"Revisit {tag} precedes the first visit of {base}")
            seen.add(base)
        return self


def make_curriculum(name: str, custom: Optional[Sequence[str]] = None) -> CurriculumSpec:
    """Named curriculum, or ``custom`` when the name is ``custom``."""
    if name == 'custom':
        visits: List[str] = list(custom or [])
    elif name in CURRICULA:
        visits = CURRICULA[name]
    else:
        raise ConfigurationError(f"Unknown curriculum {name!r}. Choose from: {', '.join([*CURRICULA, 'custom'])}")
    return CurriculumSpec(name, tuple(visits)).validate()
