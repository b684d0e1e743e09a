"""
CSV and text exports of the analysis tables.
"""

import logging
import os
from collections import defaultdict
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from .basin import BasinStats
from .geometry import Geometry
from .lineage import LineageReport
from .retention import RunMetrics, mean_ci
from ..utils.errors import ArtifactError
from ..utils.formatter import table_formatter

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.10g'
METRIC_COLUMNS = ['method', 'seed', 'mean_sr', 'ttt', 'bwt', 'coverage', 'nbwt', 'tr']
HEADLINE = ['mean_sr', 'ttt', 'ttt_revisit', 'bwt', 'coverage', 'nbwt', 'tr']


def write_table(path: str, rows: Sequence[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    """
    Write rows as CSV with a fixed float format so reruns are byte-identical.

    Raises:
        ArtifactError: If the file cannot be written
    """
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)
    try:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise ArtifactError(f"Cannot write table ({e})", path) from e
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def metrics_rows(runs: Sequence[RunMetrics]) -> List[Dict[str, Any]]:
    return [{c: run.to_dict()[c] for c in METRIC_COLUMNS} for run in runs]


def aggregate_methods(runs: Sequence[RunMetrics]) -> List[Dict[str, Any]]:
    """Mean and 95% half width of each headline column per method."""
    by_method: Dict[str, List[RunMetrics]] = defaultdict(list)
    for run in runs:
        by_method[run.method].append(run)
    rows = []
    for method, group in by_method.items():
        row: Dict[str, Any] = {'method': method, 'seeds': len(group)}
        for column in HEADLINE:
            row[column], row[f"{column}_ci"] = mean_ci([getattr(r, column) for r in group])
        rows.append(row)
    return rows


def summary_text(aggregated: Sequence[Mapping[str, Any]]) -> str:
    columns = ['method', 'seeds'] + HEADLINE
    rows = [
        [row['method'], row['seeds']] + [table_formatter.format_mean_ci(row[c], row[f"{c}_ci"]) for c in HEADLINE]
        for row in aggregated
    ]
    return table_formatter.format_table(columns, rows, style='simple', title='Mean ± 95% CI over seeds')


def matrix_rows(matrix: np.ndarray, tags: Sequence[str], kind: str) -> List[Dict[str, Any]]:
    return [
        {'kind': kind, 'row': a, 'col': b, 'value': float(matrix[i, j])}
        for i, a in enumerate(tags) for j, b in enumerate(tags)
    ]


def geometry_rows(geo: Geometry) -> List[Dict[str, Any]]:
    rows = matrix_rows(geo.separation, geo.tags, 'separation') + matrix_rows(geo.distance, geo.tags, 'distance')
    for k, tag in enumerate(geo.tags):
        rows.append({'kind': 'radius', 'row': tag, 'col': tag, 'value': float(geo.radii[k])})
    for entry in geo.nearest():
        if entry['nearest'] is not None:
            rows.append({'kind': 'nearest', 'row': entry['tag'], 'col': entry['nearest'], 'value': entry['distance']})
    return rows


def count_rows(counts: Mapping[str, Mapping[str, int]]) -> List[Dict[str, Any]]:
    return [
        {'source': row, 'target': col, 'count': n}
        for row in sorted(counts) for col, n in sorted(counts[row].items())
    ]


def group_rows(report: LineageReport) -> List[Dict[str, Any]]:
    rows = []
    for target, groups in report.groups.items():
        for grouping, (first, second) in groups.items():
            for label, values in (('first', first), ('second', second)):
                rows.append({
                    'target': target, 'grouping': grouping, 'group': label, 'n': len(values),
                    'mean_final_sr': float(np.mean(values)) if values else None,
                })
    return rows


def basin_rows(stats: Sequence[BasinStats]) -> List[Dict[str, Any]]:
    return [s.to_dict() for s in stats]
