"""
Local-basin transfer analysis for one source/target pair.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from .runlog import TransferSample
from ..utils.errors import ConfigurationError, InsufficientDataError

GAMMA = 0.9
TAU_RANK = 0.25
RANK_BINS = 4


@dataclass
class BasinStats:
    """
    Attributes:
        source_best: Candidate with the highest source fitness
        delta_good: Best target gain inside the good-enough set
        delta_local: Best target gain inside the rank basin
        span: 75th percentile of good-set distances over the full-set maximum
        good_size: Size of the good-enough set
        basin_size: Size of the rank basin
        delta_by_rank: Mean target gain per rank bin (NaN for empty bins)
    """

    source: str
    target: str
    source_best: str
    delta_good: float
    delta_local: float
    span: float
    good_size: int
    basin_size: int
    delta_by_rank: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop('delta_by_rank')
        for i, value in enumerate(self.delta_by_rank):
            data[f"delta_rank_{i}"] = value
        return data


def basin_analysis(samples: Sequence[TransferSample], gamma: float = GAMMA,
                   tau_rank: float = TAU_RANK, bins: int = RANK_BINS) -> BasinStats:
    """
    Compare transfer from the source-optimal elite with its good-enough
    neighbors.

    The good-enough set holds candidates with ``f_src >= gamma * f*``. Good
    candidates are ranked by descriptor distance to the source-best, ranks
    scaled to [0, 1]; the basin is ``rank <= tau_rank``.

    Raises:
        InsufficientDataError: If there are no samples
        ConfigurationError: If gamma or tau_rank is outside (0, 1]
    """
    if not samples:
        raise InsufficientDataError("Basin analysis needs at least one transfer sample")
    if not 0.0 < gamma <= 1.0 or not 0.0 < tau_rank <= 1.0:
        raise ConfigurationError("gamma and tau_rank must lie in (0, 1]")

    best = min(samples, key=lambda s: (-s.f_src, s.candidate_id))
    z_best = np.asarray(best.z, dtype=np.float64)
    good = [s for s in samples if s.f_src >= gamma * best.f_src]

    dist_all = np.array([np.linalg.norm(np.asarray(s.z) - z_best) for s in samples])
    dist_good = np.array([np.linalg.norm(np.asarray(s.z) - z_best) for s in good])
    delta = np.array([s.y_tgt - best.y_tgt for s in good])

    order = sorted(range(len(good)), key=lambda i: (dist_good[i], good[i].candidate_id != best.candidate_id,
                                                    good[i].candidate_id))
    ranks = np.zeros(len(good))
    if len(good) > 1:
        for position, i in enumerate(order):
            ranks[i] = position / (len(good) - 1)
    in_basin = ranks <= tau_rank

    max_all = dist_all.max()
    span = float(np.percentile(dist_good, 75) / max_all) if max_all > 0 else 0.0

    delta_by_rank = []
    edges = np.linspace(0.0, 1.0, bins + 1)
    for k in range(bins):
        lo, hi = edges[k], edges[k + 1]
        mask = (ranks >= lo) & (ranks <= hi) if k == 0 else (ranks > lo) & (ranks <= hi)
        delta_by_rank.append(float(delta[mask].mean()) if mask.any() else float('nan'))

    return BasinStats(
        source=best.source,
        target=best.target,
        source_best=best.candidate_id,
        delta_good=float(delta.max()),
        delta_local=float(delta[in_basin].max()),
        span=span,
        good_size=len(good),
        basin_size=int(in_basin.sum()),
        delta_by_rank=delta_by_rank,
    )
