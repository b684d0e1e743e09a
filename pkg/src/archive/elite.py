"""
Archived policies and their lineage.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from ..gridworld import EpisodeSet
from ..neural.layers import ParamTree
from ..utils.errors import NonFiniteError
from ..utils.tags import base_tag


@dataclass(frozen=True)
class LineageRecord:
    """Ordered base tags of the tasks an elite's ancestry was archived on."""

    visited: tuple = ()

    @property
    def depth(self) -> int:
        return len(self.visited)

    @property
    def last(self) -> Optional[str]:
        return self.visited[-1] if self.visited else None

    def append(self, tag: str) -> 'LineageRecord':
        return LineageRecord(self.visited + (base_tag(tag),))

    def to_list(self) -> List[str]:
        return list(self.visited)

    @classmethod
    def from_list(cls, tags) -> 'LineageRecord':
        return cls(tuple(base_tag(t) for t in tags))


def record_lineage(lineage: LineageRecord, tag: str) -> LineageRecord:
    """Append the prime-stripped ``tag``; called once per visit that archives a policy."""
    return lineage.append(tag)


def inherit_lineage(parent: LineageRecord, tag: str) -> LineageRecord:
    """
    Lineage of an offspring produced while illuminating ``tag``.

    Parents from the archive being built already end with ``tag``; injected
    parents from other archives get it appended.
    """
    if parent.last == base_tag(tag):
        return parent
    return parent.append(tag)


@dataclass
class Elite:
    """
    One archived policy.

    Attributes:
        elite_id: ``<tag>-<counter>`` unique within a run
        params: Policy parameters
        fitness: Mean evaluation return
        sr: Mean evaluation success rate
        descriptor: Normalized mean latent under ``version``
        sigma: Self-adapted mutation scale
        sketch: Retained evaluation episodes, None when lost
        lineage: Ancestry tags
        version: Embedding version the descriptor belongs to
        source_tag: Base tag of the archive holding the elite
        parent_id: Elite the policy was mutated from
        sketch_complete: True when the sketch holds every evaluation episode
    """

    elite_id: str
    params: ParamTree
    fitness: float
    sr: float
    descriptor: np.ndarray
    sigma: float
    sketch: Optional[EpisodeSet]
    lineage: LineageRecord
    version: int
    source_tag: str = ''
    parent_id: Optional[str] = None
    sketch_complete: bool = False

    def __post_init__(self):
        self.descriptor = np.asarray(self.descriptor, dtype=np.float64)
        if not np.all(np.isfinite(self.descriptor)):
            raise NonFiniteError(f"Elite {self.elite_id} has a non-finite descriptor")
        self.fitness = float(self.fitness)
        self.sr = float(self.sr)
        self.sigma = float(self.sigma)

    def to_record(self) -> Dict[str, Any]:
        """Manifest entry; parameters and sketch are stored separately."""
        return {
            'id': self.elite_id,
            'fitness': self.fitness,
            'sr': self.sr,
            'descriptor': self.descriptor.tolist(),
            'sigma': self.sigma,
            'lineage': self.lineage.to_list(),
            'version': int(self.version),
            'source_tag': self.source_tag,
            'parent_id': self.parent_id,
            'sketch_complete': bool(self.sketch_complete),
            'has_sketch': self.sketch is not None,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any], params: ParamTree,
                    sketch: Optional[EpisodeSet]) -> 'Elite':
        return cls(
            elite_id=record['id'],
            params=params,
            fitness=record['fitness'],
            sr=record['sr'],
            descriptor=np.asarray(record['descriptor']),
            sigma=record['sigma'],
            sketch=sketch,
            lineage=LineageRecord.from_list(record.get('lineage', [])),
            version=int(record['version']),
            source_tag=record.get('source_tag', ''),
            parent_id=record.get('parent_id'),
            sketch_complete=bool(record.get('sketch_complete', False)),
        )
