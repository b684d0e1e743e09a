"""
Utility modules for telapa-lab.
Provides the error hierarchy, seeded random streams, artifact storage and
text formatting.
"""

from .errors import (
    TelapaError,
    ConfigurationError,
    UsageError,
    ShapeError,
    NonFiniteError,
    EmptyEpisodeError,
    InsufficientDataError,
    StaleDescriptorError,
    MalformedTagError,
    ArtifactError,
)

from .seeding import derive_seed, derive_rng

from .tags import parse_tag, base_tag, is_revisit

from .storage import (
    canonical_json,
    sha256_hex,
    write_json,
    read_json,
    write_jsonl,
    read_jsonl,
    iter_jsonl,
    JsonlWriter,
    ArtifactIndex,
)

from .formatter import (
    TableFormatter,
    ProgressFormatter,
    table_formatter,
    progress_formatter,
)

__all__ = [
    # Errors
    'TelapaError',
    'ConfigurationError',
    'UsageError',
    'ShapeError',
    'NonFiniteError',
    'EmptyEpisodeError',
    'InsufficientDataError',
    'StaleDescriptorError',
    'MalformedTagError',
    'ArtifactError',

    # Seeding
    'derive_seed',
    'derive_rng',

    # Tags
    'parse_tag',
    'base_tag',
    'is_revisit',

    # Storage
    'canonical_json',
    'sha256_hex',
    'write_json',
    'read_json',
    'write_jsonl',
    'read_jsonl',
    'iter_jsonl',
    'JsonlWriter',
    'ArtifactIndex',

    # Formatter classes and instances
    'TableFormatter',
    'ProgressFormatter',
    'table_formatter',
    'progress_formatter',
]

__version__ = '1.0.0'
