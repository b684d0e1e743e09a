"""
Lineage statistics over the candidates probed for each target.
"""

from collections import defaultdict
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Tuple

import numpy as np

from ..utils.tags import base_tag

UNTAGGED = 'untagged'
CURRICULUM_INDEX = {tag: i for i, tag in enumerate('ABCDE')}

Counts = Dict[str, Dict[str, int]]
Groups = Dict[str, Tuple[List[float], List[float]]]


class LineageReport(NamedTuple):
    immediate: Counts
    visits: Counts
    groups: Dict[str, Groups]


def is_non_adjacent(lineage: List[str]) -> bool:
    """True when two consecutive lineage tags are two or more curriculum steps apart."""
    index = [CURRICULUM_INDEX[t] for t in lineage if t in CURRICULUM_INDEX]
    return any(abs(a - b) >= 2 for a, b in zip(index, index[1:]))


def _bump(counts: Counts, row: str, col: str) -> None:
    counts.setdefault(row, {})
    counts[row][col] = counts[row].get(col, 0) + 1


def lineage_matrices(candidates: Iterable[Mapping[str, Any]]) -> LineageReport:
    """
    Immediate-source counts, overlapping lineage-visit counts and group splits.

    Args:
        candidates: Probe records with ``target_tag``, ``source_tag``,
            ``lineage`` and ``final_sr``

    Returns:
        LineageReport. ``groups[target]`` maps ``breadth``, ``membership`` and
        ``adjacency`` to (first group SRs, second group SRs): breadth-rich vs
        breadth-poor, containing the target vs not, non-adjacent vs adjacent.
    """
    immediate: Counts = {}
    visits: Counts = {}
    by_target: Dict[str, List[Tuple[List[str], float]]] = defaultdict(list)

    for record in candidates:
        target = base_tag(record['target_tag'])
        lineage = [base_tag(t) for t in record.get('lineage') or []]
        source = record.get('source_tag') or UNTAGGED
        _bump(immediate, base_tag(source) if source != UNTAGGED else UNTAGGED, target)
        if lineage:
            for tag in dict.fromkeys(lineage):
                _bump(visits, tag, target)
        else:
            _bump(visits, UNTAGGED, target)
        by_target[target].append((lineage, float(record.get('final_sr', 0.0))))

    groups: Dict[str, Groups] = {}
    for target, rows in sorted(by_target.items()):
        breadth = np.array([len(set(lineage)) for lineage, _ in rows])
        median = float(np.median(breadth))
        srs = [sr for _, sr in rows]
        groups[target] = {
            'breadth': ([s for s, b in zip(srs, breadth) if b > median],
                        [s for s, b in zip(srs, breadth) if b <= median]),
            'membership': ([s for (lin, s) in rows if target in lin],
                           [s for (lin, s) in rows if target not in lin]),
            'adjacency': ([s for (lin, s) in rows if is_non_adjacent(lin)],
                          [s for (lin, s) in rows if not is_non_adjacent(lin)]),
        }
    return LineageReport(immediate, visits, groups)
