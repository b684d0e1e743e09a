"""
Episode-set banks feeding boundary maintenance.
Anchors keep high-success reference behavior (FIFO); replay keeps a uniform
reservoir over everything seen.
"""

import logging
from collections import deque
from typing import Deque, List, Optional

import numpy as np

from ..gridworld import EpisodeSet
from ..utils.errors import EmptyEpisodeError

logger = logging.getLogger(__name__)

ANCHOR_CAPACITY = 512
REPLAY_CAPACITY = 2048
ANCHOR_THRESHOLD = 0.50


class AnchorBank:
    """
    Bounded FIFO of episode sets whose mean SR met the admission threshold.
    """

    def __init__(self, capacity: int = ANCHOR_CAPACITY, threshold: float = ANCHOR_THRESHOLD):
        self.capacity = capacity
        self.threshold = threshold
        self._sets: Deque[EpisodeSet] = deque(maxlen=capacity)
        self.stats = {'admitted': 0, 'refused': 0, 'evicted': 0}

    def __len__(self) -> int:
        return len(self._sets)

    @property
    def sets(self) -> List[EpisodeSet]:
        return list(self._sets)

    def admit(self, episode_set: EpisodeSet) -> bool:
        """Store the set when its mean SR is at least the threshold."""
        if episode_set.mean_sr < self.threshold:
            self.stats['refused'] += 1
            return False
        if len(self._sets) == self.capacity:
            self.stats['evicted'] += 1
        self._sets.append(episode_set)
        self.stats['admitted'] += 1
        return True


class ReplayBank:
    """
    Reservoir of episode sets: after ``capacity`` insertions every set seen
    so far is retained with equal probability.
    """

    def __init__(self, capacity: int = REPLAY_CAPACITY, rng: Optional[np.random.Generator] = None):
        self.capacity = capacity
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self._sets: List[EpisodeSet] = []
        self.seen = 0

    def __len__(self) -> int:
        return len(self._sets)

    @property
    def sets(self) -> List[EpisodeSet]:
        return list(self._sets)

    def add(self, episode_set: EpisodeSet) -> None:
        self.seen += 1
        if len(self._sets) < self.capacity:
            self._sets.append(episode_set)
            return
        slot = int(self.rng.integers(self.seen))
        if slot < self.capacity:
            self._sets[slot] = episode_set


class Banks:
    """Anchor and replay banks updated together."""

    def __init__(self, anchors: Optional[AnchorBank] = None, replay: Optional[ReplayBank] = None):
        self.anchors = anchors or AnchorBank()
        self.replay = replay or ReplayBank()

    def store_episode_set(self, episode_set: EpisodeSet) -> bool:
        """
        Add a set to replay and, if competent enough, to the anchors.

        Returns:
            True when the set was admitted as an anchor

        Raises:
            EmptyEpisodeError: If the set has no episodes
        """
        if len(episode_set) == 0:
            raise EmptyEpisodeError("Cannot bank an empty episode set")
        self.replay.add(episode_set)
        return self.anchors.admit(episode_set)

    def union(self) -> List[EpisodeSet]:
        """Distinct sets held by either bank, anchors first."""
        seen, out = set(), []
        for episode_set in self.anchors.sets + self.replay.sets:
            if id(episode_set) not in seen:
                seen.add(id(episode_set))
                out.append(episode_set)
        return out

    def __len__(self) -> int:
        return len(self.union())

    def summary(self) -> dict:
        return {
            'anchors': len(self.anchors),
            'replay': len(self.replay),
            'replay_seen': self.replay.seen,
            'union': len(self),
            **{f"anchor_{k}": v for k, v in self.anchors.stats.items()},
        }
