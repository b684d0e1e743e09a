"""
Archive-based task initialization.
Pools candidates from prior archives, probes them on the new task and
records the chosen origin's lineage.
"""

from ..archive import LineageRecord, record_lineage, inherit_lineage
from .pooling import farthest_point, min_pairwise_distance, pool_candidates
from .selection import (
    SelectionConfig,
    ProbeResult,
    SelectionResult,
    choose_origin,
    few_shot_select,
    horizon_sr,
    probe_candidate,
)

__all__ = [
    # Lineage
    'LineageRecord',
    'record_lineage',
    'inherit_lineage',

    # Pooling
    'farthest_point',
    'min_pairwise_distance',
    'pool_candidates',

    # Selection
    'SelectionConfig',
    'ProbeResult',
    'SelectionResult',
    'choose_origin',
    'few_shot_select',
    'horizon_sr',
    'probe_candidate',
]

__version__ = '1.0.0'
