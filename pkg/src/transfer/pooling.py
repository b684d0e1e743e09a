"""
Candidate pooling across prior archives with diversity-aware down-selection.
"""

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..archive import Elite, UnstructuredArchive
from ..utils.errors import InsufficientDataError, StaleDescriptorError

logger = logging.getLogger(__name__)


def _preference(elite: Elite):
    # Higher fitness first, then earlier archive tag, then id.
    return (-elite.fitness, elite.source_tag, elite.elite_id)


def farthest_point(candidates: Sequence[Elite], k: int) -> List[Elite]:
    """
    Greedy max-min dispersion seeded with the fittest candidate.

    Each step adds the candidate whose minimum distance to the selection is
    largest, with ties going to the preferred candidate.

    Args:
        candidates: Elites to choose from
        k: Number to select

    Returns:
        Selected elites in selection order
    """
    if k >= len(candidates):
        return sorted(candidates, key=_preference)
    remaining = sorted(candidates, key=_preference)
    chosen = [remaining.pop(0)]
    z = np.stack([e.descriptor for e in remaining])
    nearest = np.linalg.norm(z - chosen[0].descriptor, axis=1)
    while len(chosen) < k:
        best = max(range(len(remaining)), key=lambda i: (nearest[i], -i))
        pick = remaining.pop(best)
        chosen.append(pick)
        z = np.delete(z, best, axis=0)
        nearest = np.delete(nearest, best)
        if remaining:
            nearest = np.minimum(nearest, np.linalg.norm(z - pick.descriptor, axis=1))
    return chosen


def pool_candidates(archives: Iterable[UnstructuredArchive], k_pool: int,
                    version: Optional[int] = None) -> List[Elite]:
    """
    Pool the union of prior archives and down-select it to ``k_pool`` elites.

    Args:
        archives: Archives of previously visited tasks
        k_pool: Pool size
        version: Embedding version every archive must carry

    Returns:
        At most ``k_pool`` elites

    Raises:
        InsufficientDataError: If the union is empty
        StaleDescriptorError: If an archive is at another embedding version
    """
    union: List[Elite] = []
    for archive in archives:
        if version is not None and archive.version != version:
            raise StaleDescriptorError(version, archive.version)
        union.extend(archive.elites)
    if not union:
        raise InsufficientDataError("No archived elites to pool")
    pool = farthest_point(union, k_pool)
    logger.info(f"Pooled {len(pool)} of {len(union)} archived elites")
    return pool


def min_pairwise_distance(elites: Sequence[Elite]) -> float:
    if len(elites) < 2:
        return float('inf')
    z = np.stack([e.descriptor for e in elites])
    d = np.linalg.norm(z[:, None, :] - z[None, :, :], axis=2)
    return float(d[np.triu_indices(len(elites), k=1)].min())
