"""
Parent choice and self-adaptive Gaussian mutation.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .container import UnstructuredArchive
from .elite import Elite
from ..neural.layers import ParamTree
from ..utils.errors import UsageError

logger = logging.getLogger(__name__)


@dataclass
class InjectionPool:
    """Elites drawn from other archives that may replace the usual parent."""

    candidates: List[Elite] = field(default_factory=list)
    lam: float = 0.5
    subset_size: int = 16

    def __len__(self) -> int:
        return len(self.candidates)


def mutate(parent: Elite, rng: np.random.Generator, sigma_lr: float = 0.2,
           sigma_low: float = 1e-3, sigma_high: float = 1.0) -> Tuple[ParamTree, float]:
    """
    Log-normal step-size self-adaptation followed by a Gaussian step.

    Returns:
        (offspring parameters, offspring mutation scale)
    """
    sigma = float(np.clip(parent.sigma * np.exp(sigma_lr * rng.standard_normal()), sigma_low, sigma_high))
    child = {}
    for name in sorted(parent.params):
        value = np.asarray(parent.params[name], dtype=np.float64)
        child[name] = value + sigma * rng.standard_normal(value.shape)
    return child, sigma


def injection_scores(archive_descriptors: np.ndarray, candidates: Sequence[Elite], lam: float) -> np.ndarray:
    """
    ``min distance to the archive + lam * min-max normalized fitness`` per candidate.

    A constant-fitness subset contributes zero fitness bonus.
    """
    z = np.stack([c.descriptor for c in candidates])
    if archive_descriptors.size:
        dist = np.linalg.norm(z[:, None, :] - archive_descriptors[None, :, :], axis=2).min(axis=1)
    else:
        dist = np.zeros(len(candidates))
    fitness = np.array([c.fitness for c in candidates])
    spread = fitness.max() - fitness.min()
    norm_fitness = (fitness - fitness.min()) / spread if spread > 0 else np.zeros_like(fitness)
    return dist + lam * norm_fitness


def select_parent(archive: UnstructuredArchive, pool: Optional[InjectionPool], p_inj: float,
                  rng: np.random.Generator) -> Tuple[Elite, bool]:
    """
    Choose the next parent.

    With probability ``p_inj`` (and a non-empty pool) a random subset of the
    pool is scored and the best-scoring candidate is returned; otherwise an
    archive elite is drawn uniformly.

    Returns:
        (parent, True when it came from the pool)

    Raises:
        UsageError: If the archive is empty
    """
    if not archive.elites:
        raise UsageError("Cannot select a parent from an empty archive")
    if p_inj > 0 and pool is not None and len(pool) and rng.random() < p_inj:
        size = min(pool.subset_size, len(pool))
        picks = sorted(rng.choice(len(pool), size=size, replace=False).tolist())
        subset = [pool.candidates[i] for i in picks]
        scores = injection_scores(archive.descriptors(), subset, pool.lam)
        return subset[int(np.argmax(scores))], True
    return archive.elites[int(rng.integers(len(archive.elites)))], False
