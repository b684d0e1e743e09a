"""
Run records consumed by the metric suite.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..utils.errors import ConfigurationError
from ..utils.storage import read_json, write_json
from ..utils.tags import base_tag

logger = logging.getLogger(__name__)

SCRATCH_CALIBRATED = 'scratch-calibrated'
FALLBACK = 'fallback'


@dataclass
class TaskThreshold:
    tag: str
    tau: float
    source: str = FALLBACK


@dataclass
class VisitRecord:
    """
    One visit of the curriculum.

    Attributes:
        tag: Visit tag, primes allowed
        sr_post: SR right after training on the visit
        sr_end: SR of the deployed policy for the base tag at sequence end
        curve: (env steps, SR) checkpoints of the training run
        budget: Training budget of the visit in env steps
        origin: Elite id the visit was initialized from, if any
    """

    tag: str
    sr_post: float
    sr_end: Optional[float] = None
    curve: List[Tuple[int, float]] = field(default_factory=list)
    budget: int = 0
    origin: Optional[str] = None

    @property
    def base(self) -> str:
        return base_tag(self.tag)

    @property
    def revisit(self) -> bool:
        return self.tag.endswith("'")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['curve'] = [list(point) for point in self.curve]
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'VisitRecord':
        return cls(
            tag=data['tag'],
            sr_post=float(data['sr_post']),
            sr_end=None if data.get('sr_end') is None else float(data['sr_end']),
            curve=[(int(s), float(v)) for s, v in data.get('curve', [])],
            budget=int(data.get('budget', 0)),
            origin=data.get('origin'),
        )


@dataclass
class TransferSample:
    """Zero-shot outcome of one archived elite of ``source`` on ``target``."""

    source: str
    target: str
    candidate_id: str
    f_src: float
    y_tgt: float
    z: List[float]

    def __post_init__(self):
        values = [self.f_src, self.y_tgt, *self.z]
        if not np.all(np.isfinite(values)):
            raise ConfigurationError(f"Transfer sample {self.candidate_id} is not finite")


@dataclass
class RunLog:
    """Per-visit records of one (method, seed) run plus its transfer samples."""

    method: str
    seed: int
    visits: List[VisitRecord] = field(default_factory=list)
    transfer_samples: List[TransferSample] = field(default_factory=list)

    def add_visit(self, visit: VisitRecord) -> None:
        self.visits.append(visit)

    def set_end(self, base: str, sr_end: float) -> None:
        for visit in self.visits:
            if visit.base == base:
                visit.sr_end = float(sr_end)

    def base_tags(self) -> List[str]:
        return sorted({v.base for v in self.visits})

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'seed': self.seed,
            'visits': [v.to_dict() for v in self.visits],
            'transfer_samples': [asdict(s) for s in self.transfer_samples],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'RunLog':
        return cls(
            method=data['method'],
            seed=int(data['seed']),
            visits=[VisitRecord.from_dict(v) for v in data.get('visits', [])],
            transfer_samples=[TransferSample(**s) for s in data.get('transfer_samples', [])],
        )

    def save(self, path: str) -> str:
        return write_json(path, self.to_dict())

    @classmethod
    def load(cls, path: str) -> 'RunLog':
        return cls.from_dict(read_json(path))
