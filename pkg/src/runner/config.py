"""
Run configuration.
A run config is one JSON document deep-merged over DEFAULT_CONFIG and turned
into typed section dataclasses; runtime settings come from the environment.
"""

import copy
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional

from dotenv import load_dotenv

from ..agent import DEFAULT_L2INIT_LAMBDA, DEFAULT_PERTURB_SCALE, DEFAULT_SHRINK_ALPHA, PPOConfig
from ..archive import ArchiveConfig
from ..embedder import EmbedderConfig
from ..maintenance import MaintenanceConfig
from ..metrics import GAMMA, TAU_MIN, TAU_RANK
from ..transfer import SelectionConfig
from ..utils.errors import ConfigurationError
from ..utils.storage import canonical_json, read_json, sha256_hex

logger = logging.getLogger(__name__)

METHODS = (
    'telapa',
    'telapa_static',
    'scratch',
    'scratch_reuse',
    'finetune',
    'finetune_reset',
    'l2init',
    'shrink_perturb',
)

ARCHIVE_METHODS = ('telapa', 'telapa_static')

DEFAULT_CONFIG = {
    'method': 'telapa',
    'seed': 0,
    'curriculum': 'main',
    'custom_curriculum': [],
    'task': {'variant': 'standard', 'max_steps': None, 'task_seed': None},
    'ppo': PPOConfig().to_dict(),
    'embedder': EmbedderConfig().to_dict(),
    'archive': ArchiveConfig().to_dict(),
    'selection': SelectionConfig().to_dict(),
    'maintenance': MaintenanceConfig().to_dict(),
    'metrics': {
        'tau_min': TAU_MIN,
        'gamma': GAMMA,
        'tau_rank': TAU_RANK,
        'basin_samples': 16,
        'basin_episodes': 5,
        'end_eval_episodes': 20,
        'qd_bins': 10,
    },
    'baselines': {
        'l2_lambda': DEFAULT_L2INIT_LAMBDA,
        'shrink_alpha': DEFAULT_SHRINK_ALPHA,
        'perturb_scale': DEFAULT_PERTURB_SCALE,
    },
}


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursively overlay ``override`` on a copy of ``base``."""
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


@dataclass
class TaskConfig:
    variant: str = 'standard'
    max_steps: Optional[int] = None
    task_seed: Optional[int] = None

    def validate(self) -> 'TaskConfig':
        if self.variant not in ('standard', 'small'):
            raise ConfigurationError(f"Unknown task variant {self.variant!r}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigurationError("Task step limit must be positive")
        return self


@dataclass
class MetricsConfig:
    """Threshold floor, basin parameters and the evaluation budgets of the analysis."""

    tau_min: float = TAU_MIN
    gamma: float = GAMMA
    tau_rank: float = TAU_RANK
    basin_samples: int = 16
    basin_episodes: int = 5
    end_eval_episodes: int = 20
    qd_bins: int = 10

    def validate(self) -> 'MetricsConfig':
        if not 0.0 < self.tau_min < 1.0:
            raise ConfigurationError(f"tau_min must lie in (0, 1), got {self.tau_min}")
        if not 0.0 < self.gamma <= 1.0 or not 0.0 < self.tau_rank <= 1.0:
            raise ConfigurationError("gamma and tau_rank must lie in (0, 1]")
        if self.basin_samples < 0 or self.basin_episodes < 1 or self.end_eval_episodes < 1 or self.qd_bins < 1:
            raise ConfigurationError("Analysis budgets must be positive")
        return self


@dataclass
class BaselineConfig:
    l2_lambda: float = DEFAULT_L2INIT_LAMBDA
    shrink_alpha: float = DEFAULT_SHRINK_ALPHA
    perturb_scale: float = DEFAULT_PERTURB_SCALE

    def validate(self) -> 'BaselineConfig':
        if self.l2_lambda < 0:
            raise ConfigurationError("L2Init lambda must be non-negative")
        if not 0.0 <= self.shrink_alpha <= 1.0:
            raise ConfigurationError(f"Shrink factor must lie in [0, 1], got {self.shrink_alpha}")
        if self.perturb_scale < 0:
            raise ConfigurationError("Perturbation scale must be non-negative")
        return self


@dataclass
class RunConfig:
    """
    Everything one (method, seed) run depends on.

    ``to_dict`` gives the serialization whose canonical JSON is hashed into
    the manifest.
    """

    method: str = 'telapa'
    seed: int = 0
    curriculum: str = 'main'
    custom_curriculum: List[str] = field(default_factory=list)
    task: TaskConfig = field(default_factory=TaskConfig)
    ppo: PPOConfig = field(default_factory=PPOConfig)
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    archive: ArchiveConfig = field(default_factory=ArchiveConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    maintenance: MaintenanceConfig = field(default_factory=MaintenanceConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    baselines: BaselineConfig = field(default_factory=BaselineConfig)

    def validate(self) -> 'RunConfig':
        if self.method not in METHODS:
            raise ConfigurationError(f"Unknown method {self.method!r}. Choose from: {', '.join(METHODS)}")
        if self.curriculum == 'custom' and not self.custom_curriculum:
            raise ConfigurationError("A custom curriculum needs a non-empty 'custom_curriculum' list")
        for section in (self.task, self.ppo, self.embedder, self.archive, self.selection,
                        self.maintenance, self.metrics, self.baselines):
            section.validate()
        return self

    @property
    def uses_archives(self) -> bool:
        return self.method in ARCHIVE_METHODS

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'seed': int(self.seed),
            'curriculum': self.curriculum,
            'custom_curriculum': list(self.custom_curriculum),
            'task': asdict(self.task),
            'ppo': self.ppo.to_dict(),
            'embedder': self.embedder.to_dict(),
            'archive': self.archive.to_dict(),
            'selection': self.selection.to_dict(),
            'maintenance': self.maintenance.to_dict(),
            'metrics': asdict(self.metrics),
            'baselines': asdict(self.baselines),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'RunConfig':
        merged = deep_merge(DEFAULT_CONFIG, data)
        unknown = set(merged) - set(DEFAULT_CONFIG)
        if unknown:
            raise ConfigurationError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        try:
            config = cls(
                method=merged['method'],
                seed=int(merged['seed']),
                curriculum=merged['curriculum'],
                custom_curriculum=list(merged['custom_curriculum']),
                task=TaskConfig(**merged['task']),
                ppo=PPOConfig.from_dict(merged['ppo']),
                embedder=EmbedderConfig.from_dict(merged['embedder']),
                archive=ArchiveConfig.from_dict(merged['archive']),
                selection=SelectionConfig.from_dict(merged['selection']),
                maintenance=MaintenanceConfig.from_dict(merged['maintenance']),
                metrics=MetricsConfig(**merged['metrics']),
                baselines=BaselineConfig(**merged['baselines']),
            )
        except TypeError as e:
            raise ConfigurationError(f"Invalid config section ({e})") from e
        return config.validate()

    def with_overrides(self, **overrides: Any) -> 'RunConfig':
        return RunConfig.from_dict(deep_merge(self.to_dict(), overrides))

    def serialize(self) -> str:
        return canonical_json(self.to_dict())

    def config_hash(self) -> str:
        return sha256_hex(self.serialize())


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Read a JSON run config, merge it over the defaults and validate it.

    Args:
        path: Config file; defaults only when None
        overrides: Values applied on top of the file (e.g. CLI flags)

    Returns:
        Validated RunConfig
    """
    data: Dict[str, Any] = read_json(path) if path else {}
    if overrides:
        data = deep_merge(data, overrides)
    config = RunConfig.from_dict(data)
    logger.debug(f"Loaded config {path or '<defaults>'} with hash {config.config_hash()[:12]}")
    return config


@dataclass
class RuntimeSettings:
    """Process-level settings that never enter the config hash."""

    threads: int = 1
    output_dir: str = 'runs'
    log_level: str = 'INFO'

    @classmethod
    def from_environment(cls) -> 'RuntimeSettings':
        load_dotenv()
        settings = cls()
        env_mappings = {
            'TELAPA_THREADS': ('threads', int),
            'TELAPA_OUTPUT_DIR': ('output_dir', str),
            'TELAPA_LOG_LEVEL': ('log_level', lambda x: x.upper()),
        }
        for env_key, (attr, converter) in env_mappings.items():
            value = os.getenv(env_key)
            if value is not None:
                try:
                    setattr(settings, attr, converter(value))
                except ValueError as e:
                    raise ConfigurationError(f"Bad value for {env_key}: {value!r}") from e
        settings.threads = max(1, settings.threads)
        return settings
