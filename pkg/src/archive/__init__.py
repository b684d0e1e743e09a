"""
Per-task quality-diversity archives.
Provides the unstructured elite container, parent selection with optional
cross-archive injection, self-adaptive mutation, illumination, and
re-embedding with snapshots.
"""

from .elite import Elite, LineageRecord, record_lineage, inherit_lineage
from .container import ArchiveConfig, InsertResult, UnstructuredArchive, INSERTED, REPLACED, REJECTED
from .variation import InjectionPool, injection_scores, mutate, select_parent
from .illumination import (
    IlluminationResult,
    ReembedReport,
    build_elite,
    competence_gate,
    illuminate,
    native_reevaluator,
    reembed,
)
from .snapshot import archive_dir, archive_manifest, load_archive, save_archive, save_stale_snapshot

__all__ = [
    # Elites
    'Elite',
    'LineageRecord',
    'record_lineage',
    'inherit_lineage',

    # Container
    'ArchiveConfig',
    'InsertResult',
    'UnstructuredArchive',
    'INSERTED',
    'REPLACED',
    'REJECTED',

    # Variation
    'InjectionPool',
    'injection_scores',
    'mutate',
    'select_parent',

    # Illumination
    'IlluminationResult',
    'ReembedReport',
    'build_elite',
    'competence_gate',
    'illuminate',
    'native_reevaluator',
    'reembed',

    # Snapshots
    'archive_dir',
    'archive_manifest',
    'load_archive',
    'save_archive',
    'save_stale_snapshot',
]

__version__ = '1.0.0'
