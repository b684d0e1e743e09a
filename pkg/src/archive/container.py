"""
Distance-thresholded elite container with adaptive spacing.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .elite import Elite
from ..gridworld import EpisodeSet
from ..utils.errors import ConfigurationError, StaleDescriptorError

logger = logging.getLogger(__name__)

INSERTED = 'inserted'
REPLACED = 'replaced'
REJECTED = 'rejected'


@dataclass
class ArchiveConfig:
    """Container sizes, spacing control and the illumination loop settings."""

    target_size: int = 256
    capacity: int = 384
    d_min: float = 0.10
    d_min_low: float = 1e-4
    d_min_high: float = 10.0
    grow_factor: float = 1.05
    shrink_factor: float = 0.99
    low_occupancy: float = 0.9
    sigma0: float = 0.05
    sigma_low: float = 1e-3
    sigma_high: float = 1.0
    sigma_lr: float = 0.2
    iterations: int = 300
    eval_episodes: int = 10
    sketch_episodes: int = 10
    gate_floor: float = 0.05
    gate_ratio: float = 0.5
    injection_prob: float = 0.0
    injection_lambda: float = 0.5
    injection_subset: int = 16
    reevaluate_fraction: float = 0.25

    def validate(self) -> 'ArchiveConfig':
        if self.target_size < 1 or self.capacity < self.target_size:
            raise ConfigurationError("Archive capacity must be at least the target size")
        if not self.d_min_low <= self.d_min <= self.d_min_high:
            raise ConfigurationError(f"d_min {self.d_min} outside [{self.d_min_low}, {self.d_min_high}]")
        if not self.sigma_low <= self.sigma0 <= self.sigma_high:
            raise ConfigurationError(f"Initial mutation scale {self.sigma0} outside its bounds")
        if self.iterations < 0 or self.eval_episodes < 1 or self.sketch_episodes < 1:
            raise ConfigurationError("Illumination budget and episode counts must be positive")
        if not 0.0 <= self.injection_prob <= 1.0:
            raise ConfigurationError("Injection probability must lie in [0, 1]")
        if self.injection_subset < 1 or self.injection_lambda < 0:
            raise ConfigurationError("Injection subset must be positive and lambda non-negative")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'ArchiveConfig':
        return cls(**data).validate()


class InsertResult(NamedTuple):
    outcome: str
    old: Optional[Elite] = None
    evicted: Tuple[Elite, ...] = ()


class UnstructuredArchive:
    """
    Per-task archive of behaviorally spaced elites.

    A candidate closer than ``d_min`` to existing elites replaces all of them
    when it beats the best one and is rejected otherwise. A far candidate is
    inserted while there is room; at capacity it displaces the lowest-fitness
    elite only if it is fitter.
    """

    def __init__(self, base_tag: str, config: Optional[ArchiveConfig] = None, version: int = 0):
        self.config = (config or ArchiveConfig()).validate()
        self.base_tag = base_tag
        self.version = int(version)
        self.d_min = float(self.config.d_min)
        self.elites: List[Elite] = []
        self.z_ref: Optional[np.ndarray] = None
        self.base_elite_id: Optional[str] = None
        self.base_sketch: Optional[EpisodeSet] = None
        self.counter = 0
        self.stats = {INSERTED: 0, REPLACED: 0, REJECTED: 0, 'gated': 0, 'evaluations': 0}

    def __len__(self) -> int:
        return len(self.elites)

    def __iter__(self) -> Iterator[Elite]:
        return iter(self.elites)

    def next_id(self) -> str:
        self.counter += 1
        return f"{self.base_tag}-{self.counter:05d}"

    def descriptors(self) -> np.ndarray:
        if not self.elites:
            return np.zeros((0, 0))
        return np.stack([e.descriptor for e in self.elites])

    def distances(self, z: np.ndarray) -> np.ndarray:
        if not self.elites:
            return np.zeros(0)
        return np.linalg.norm(self.descriptors() - np.asarray(z), axis=1)

    def get(self, elite_id: str) -> Optional[Elite]:
        for elite in self.elites:
            if elite.elite_id == elite_id:
                return elite
        return None

    def best(self) -> Elite:
        return max(self.elites, key=lambda e: e.fitness)

    def try_insert(self, elite: Elite, force: bool = False) -> InsertResult:
        """
        Offer a candidate to the archive.

        Args:
            elite: Candidate with a descriptor at the archive's version
            force: Insert regardless of fitness (used for a refreshed base elite)

        Returns:
            InsertResult; ``old`` is the nearest displaced elite for in-ball
            replacements, ``evicted`` lists every removed elite

        Raises:
            StaleDescriptorError: If the candidate's version differs
        """
        if elite.version != self.version:
            raise StaleDescriptorError(self.version, elite.version)

        result = self._place(elite, force)
        self.stats[result.outcome] += 1
        logger.debug(f"[{self.base_tag}] {elite.elite_id} {result.outcome} (size {len(self.elites)})")
        return result

    def _place(self, elite: Elite, force: bool) -> InsertResult:
        if not self.elites:
            self.elites.append(elite)
            return InsertResult(INSERTED)

        dist = self.distances(elite.descriptor)
        in_ball = np.flatnonzero(dist < self.d_min)
        if in_ball.size:
            best_in_ball = max(self.elites[i].fitness for i in in_ball)
            if not force and elite.fitness <= best_in_ball:
                return InsertResult(REJECTED)
            nearest = self.elites[int(in_ball[np.argmin(dist[in_ball])])]
            evicted = tuple(self.elites[i] for i in in_ball)
            keep = set(range(len(self.elites))) - set(int(i) for i in in_ball)
            self.elites = [self.elites[i] for i in sorted(keep)] + [elite]
            return InsertResult(REPLACED, nearest, evicted)

        if len(self.elites) < self.config.capacity:
            self.elites.append(elite)
            return InsertResult(INSERTED)

        worst_index = min(range(len(self.elites)),
                          key=lambda i: (self.elites[i].fitness, self.elites[i].elite_id))
        worst = self.elites[worst_index]
        if not force and elite.fitness <= worst.fitness:
            return InsertResult(REJECTED)
        self.elites[worst_index] = elite
        return InsertResult(INSERTED, None, (worst,))

    def adapt_dmin(self) -> float:
        """Multiplicative spacing control toward the target size."""
        cfg = self.config
        if len(self.elites) > cfg.target_size:
            self.d_min *= cfg.grow_factor
        elif len(self.elites) < cfg.low_occupancy * cfg.target_size:
            self.d_min *= cfg.shrink_factor
        self.d_min = float(np.clip(self.d_min, cfg.d_min_low, cfg.d_min_high))
        return self.d_min

    def repack(self) -> int:
        """
        Greedily keep elites by descending fitness (ties by id), dropping any
        closer than ``d_min`` to one already kept, then enforce capacity.

        Returns:
            Number of elites removed
        """
        order = sorted(self.elites, key=lambda e: (-e.fitness, e.elite_id))
        kept: List[Elite] = []
        kept_z: List[np.ndarray] = []
        for elite in order:
            if len(kept) >= self.config.capacity:
                break
            if not kept or np.linalg.norm(np.stack(kept_z) - elite.descriptor, axis=1).min() >= self.d_min:
                kept.append(elite)
                kept_z.append(np.asarray(elite.descriptor, dtype=float))
        removed = len(self.elites) - len(kept)
        self.elites = kept
        if removed:
            logger.info(f"[{self.base_tag}] Repack removed {removed} elites at d_min={self.d_min:.4f}")
        return removed

    def min_pairwise_distance(self) -> float:
        if len(self.elites) < 2:
            return float('inf')
        z = self.descriptors()
        diff = np.linalg.norm(z[:, None, :] - z[None, :, :], axis=2)
        return float(diff[np.triu_indices(len(z), k=1)].min())

    def summary(self) -> Dict[str, Any]:
        fitness = [e.fitness for e in self.elites]
        srs = [e.sr for e in self.elites]
        return {
            'base_tag': self.base_tag,
            'size': len(self.elites),
            'd_min': self.d_min,
            'embedding_version': self.version,
            'mean_fitness': float(np.mean(fitness)) if fitness else None,
            'max_fitness': float(np.max(fitness)) if fitness else None,
            'mean_sr': float(np.mean(srs)) if srs else None,
            'inserted': self.stats[INSERTED],
            'replaced': self.stats[REPLACED],
            'rejected': self.stats[REJECTED],
            'gated': self.stats['gated'],
        }
