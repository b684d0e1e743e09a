"""
Episodic count-based exploration bonus.
"""

import math
from collections import defaultdict
from typing import Dict, Hashable

from ..utils.errors import ConfigurationError


class EpisodicCounter:
    """Visit counts of hashed states within the current episode."""

    def __init__(self):
        self.counts: Dict[Hashable, int] = defaultdict(int)

    def increment(self, key: Hashable) -> int:
        self.counts[key] += 1
        return self.counts[key]

    def count(self, key: Hashable) -> int:
        return self.counts.get(key, 0)

    def reset(self) -> None:
        self.counts.clear()

    def __len__(self) -> int:
        return len(self.counts)


def intrinsic_bonus(counter: EpisodicCounter, key: Hashable, beta: float) -> float:
    """
    ``beta / sqrt(N(key))`` for a state already counted this episode.

    Args:
        counter: Episode counter, incremented for this visit
        key: Hashed state
        beta: Bonus scale (non-negative)

    Returns:
        Bonus value; 0 when ``beta`` is 0 or the key was never counted
    """
    if beta < 0:
        raise ConfigurationError(f"Intrinsic beta must be non-negative, got {beta}")
    n = counter.count(key)
    if beta == 0 or n == 0:
        return 0.0
    return beta / math.sqrt(n)
