"""
Experiment orchestration.
Provides run configuration, curricula, the per-run event log, the
per-task sequence loop for every method, suites and report emission.
"""

from .config import (
    METHODS,
    ARCHIVE_METHODS,
    DEFAULT_CONFIG,
    TaskConfig,
    MetricsConfig,
    BaselineConfig,
    RunConfig,
    RuntimeSettings,
    deep_merge,
    load_config,
)
from .curriculum import CURRICULA, CurriculumSpec, make_curriculum
from .eventlog import (
    EVENTS_FILE,
    MANIFEST_FILE,
    RUNLOG_FILE,
    EVENT_KINDS,
    EventLog,
    BudgetMeter,
    read_events,
    read_manifest,
    write_manifest,
)
from .sequence import RunArtifacts, SequenceRunner, illuminate_task, policy_path, run_directory, run_sequence
from .report import REPORT_FILES, LoadedRun, analyze_run, emit_report, load_run, load_thresholds, save_thresholds
from .suite import SuiteResult, calibrate_thresholds, report_suite, run_suite

__all__ = [
    # Configuration
    'METHODS',
    'ARCHIVE_METHODS',
    'DEFAULT_CONFIG',
    'TaskConfig',
    'MetricsConfig',
    'BaselineConfig',
    'RunConfig',
    'RuntimeSettings',
    'deep_merge',
    'load_config',

    # Curricula
    'CURRICULA',
    'CurriculumSpec',
    'make_curriculum',

    # Event log
    'EVENTS_FILE',
    'MANIFEST_FILE',
    'RUNLOG_FILE',
    'EVENT_KINDS',
    'EventLog',
    'BudgetMeter',
    'read_events',
    'read_manifest',
    'write_manifest',

    # Sequence
    'RunArtifacts',
    'SequenceRunner',
    'illuminate_task',
    'policy_path',
    'run_directory',
    'run_sequence',

    # Reports and suites
    'REPORT_FILES',
    'LoadedRun',
    'analyze_run',
    'emit_report',
    'load_run',
    'load_thresholds',
    'save_thresholds',
    'SuiteResult',
    'calibrate_thresholds',
    'report_suite',
    'run_suite',
]

__version__ = '1.0.0'
