"""
Episode records and their JSON-lines representation.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from .constants import FEATURE_DIM
from ..utils.errors import EmptyEpisodeError, ShapeError
from ..utils.storage import read_jsonl, write_jsonl

logger = logging.getLogger(__name__)


@dataclass
class Episode:
    """
    One rollout's behavior trace.

    Attributes:
        features: Array (T, 11)
        ret: Episode return in [0, 1]
        success: True iff the return is positive
        seed: Layout seed the episode was generated from
    """

    features: np.ndarray
    ret: float
    success: bool
    seed: int = 0

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2 or self.features.shape[1] != FEATURE_DIM:
            raise ShapeError(f"Episode features must be (T, {FEATURE_DIM}), got {self.features.shape}")
        if self.features.shape[0] < 1:
            raise EmptyEpisodeError("Episode has no steps")
        self.ret = float(self.ret)
        self.success = bool(self.success)

    @property
    def length(self) -> int:
        return int(self.features.shape[0])

    def to_record(self, task_tag: str) -> Dict[str, Any]:
        return {
            'task_tag': task_tag,
            'seed': int(self.seed),
            'T': self.length,
            'features': self.features.reshape(-1).tolist(),
            'return': self.ret,
            'success': self.success,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> 'Episode':
        t = int(record['T'])
        feats = np.asarray(record['features'], dtype=np.float64).reshape(t, FEATURE_DIM)
        return cls(feats, record['return'], record['success'], int(record.get('seed', 0)))


class EpisodeSet:
    """
    Episodes of one policy on one task, the unit that gets embedded.
    """

    def __init__(self, episodes: Iterable[Episode], tag: str = ''):
        self.episodes: List[Episode] = list(episodes)
        if not self.episodes:
            raise EmptyEpisodeError("EpisodeSet needs at least one episode")
        self.tag = tag

    def __len__(self) -> int:
        return len(self.episodes)

    def __iter__(self):
        return iter(self.episodes)

    def __getitem__(self, index):
        return self.episodes[index]

    @property
    def mean_sr(self) -> float:
        return float(np.mean([e.success for e in self.episodes]))

    @property
    def mean_return(self) -> float:
        return float(np.mean([e.ret for e in self.episodes]))

    @property
    def total_steps(self) -> int:
        return int(sum(e.length for e in self.episodes))

    def head(self, n: int) -> 'EpisodeSet':
        return EpisodeSet(self.episodes[:max(1, n)], self.tag)

    def to_records(self) -> List[Dict[str, Any]]:
        return [e.to_record(self.tag) for e in self.episodes]


def save_episodes(path: str, episode_set: EpisodeSet) -> int:
    return write_jsonl(path, episode_set.to_records())


def load_episodes(path: str, tag: Optional[str] = None) -> EpisodeSet:
    """
    Read an episode JSONL file.

    Args:
        path: File path
        tag: Tag for the set; defaults to the first record's task tag
    """
    records = read_jsonl(path)
    if not records:
        raise EmptyEpisodeError(f"No episodes in {path}")
    return EpisodeSet([Episode.from_record(r) for r in records], tag or records[0]['task_tag'])
