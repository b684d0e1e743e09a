"""
Evaluation metrics and analysis tables.
Provides retention and time-to-threshold metrics, local-basin transfer
analysis, novelty and geometry diagnostics, lineage statistics and CSV
exports.
"""

from .runlog import RunLog, VisitRecord, TransferSample, TaskThreshold, SCRATCH_CALIBRATED, FALLBACK
from .retention import (
    RunMetrics,
    TAU_MIN,
    compute_threshold,
    mean_ci,
    retention_metrics,
    summarize_run,
    threshold_of,
    ttt,
)
from .basin import BasinStats, GAMMA, TAU_RANK, basin_analysis
from .geometry import Geometry, geometry, novelty_norm, qd_bins
from .lineage import LineageReport, UNTAGGED, CURRICULUM_INDEX, is_non_adjacent, lineage_matrices
from .export import (
    FLOAT_FORMAT,
    METRIC_COLUMNS,
    aggregate_methods,
    basin_rows,
    count_rows,
    geometry_rows,
    group_rows,
    metrics_rows,
    summary_text,
    write_table,
)

__all__ = [
    # Run records
    'RunLog',
    'VisitRecord',
    'TransferSample',
    'TaskThreshold',
    'SCRATCH_CALIBRATED',
    'FALLBACK',

    # Retention
    'RunMetrics',
    'TAU_MIN',
    'compute_threshold',
    'mean_ci',
    'retention_metrics',
    'summarize_run',
    'threshold_of',
    'ttt',

    # Basin
    'BasinStats',
    'GAMMA',
    'TAU_RANK',
    'basin_analysis',

    # Geometry
    'Geometry',
    'geometry',
    'novelty_norm',
    'qd_bins',

    # Lineage
    'LineageReport',
    'UNTAGGED',
    'CURRICULUM_INDEX',
    'is_non_adjacent',
    'lineage_matrices',

    # Exports
    'FLOAT_FORMAT',
    'METRIC_COLUMNS',
    'aggregate_methods',
    'basin_rows',
    'count_rows',
    'geometry_rows',
    'group_rows',
    'metrics_rows',
    'summary_text',
    'write_table',
]

__version__ = '1.0.0'
