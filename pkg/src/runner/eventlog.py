"""
Run event log and manifest.
"""

import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from ..utils.errors import UsageError
from ..utils.storage import JsonlWriter, read_json, read_jsonl, write_json

logger = logging.getLogger(__name__)

EVENTS_FILE = 'events.jsonl'
MANIFEST_FILE = 'manifest.json'
RUNLOG_FILE = 'runlog.json'
CODE_VERSION = '1.0.0'

EVENT_KINDS = (
    'task_start',
    'train_checkpoint',
    'probe',
    'selection',
    'archive',
    'maintenance',
    'visit_end',
    'final_eval',
    'error',
)


class EventLog:
    """
    JSON-lines log of run events, one object per line with a ``kind`` field.

    Events carry no wall-clock time so reruns produce identical files.
    """

    def __init__(self, run_dir: str):
        self.path = os.path.join(run_dir, EVENTS_FILE)
        self._writer = JsonlWriter(self.path)
        self.counts: Dict[str, int] = {kind: 0 for kind in EVENT_KINDS}

    def emit(self, kind: str, **fields: Any) -> None:
        if kind not in self.counts:
            raise UsageError(f"Unknown event kind {kind!r}")
        self._writer.write({'kind': kind, **fields})
        self.counts[kind] += 1

    def write(self, record: Dict[str, Any]) -> None:
        """Log a record that already carries its ``kind``."""
        record = dict(record)
        self.emit(record.pop('kind'), **record)

    def close(self) -> None:
        self._writer.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def read_events(run_dir: str, kind: Optional[str] = None) -> List[Dict[str, Any]]:
    """
    Raises:
        ArtifactError: If the run has no event log
    """
    events = read_jsonl(os.path.join(run_dir, EVENTS_FILE))
    return [e for e in events if kind is None or e.get('kind') == kind]


class BudgetMeter:
    """Environment steps spent per purpose."""

    PURPOSES = ('training', 'probe', 'evaluation', 'illumination')

    def __init__(self):
        self.steps = {purpose: 0 for purpose in self.PURPOSES}

    def add(self, purpose: str, steps: int) -> None:
        self.steps[purpose] += int(steps)

    @property
    def total(self) -> int:
        return sum(self.steps.values())

    def to_dict(self) -> Dict[str, int]:
        return {**self.steps, 'total': self.total}


def write_manifest(run_dir: str, config_json: str, config_hash: str, method: str, seed: int,
                   budget: Optional[BudgetMeter] = None, status: str = 'running',
                   extra: Optional[Dict[str, Any]] = None) -> str:
    manifest = {
        'config': config_json,
        'config_hash': config_hash,
        'code_version': CODE_VERSION,
        'method': method,
        'seed': seed,
        'status': status,
        'budget': budget.to_dict() if budget is not None else None,
        'created_at': datetime.now().isoformat(timespec='seconds'),
        **(extra or {}),
    }
    return write_json(os.path.join(run_dir, MANIFEST_FILE), manifest)


def read_manifest(run_dir: str) -> Dict[str, Any]:
    return read_json(os.path.join(run_dir, MANIFEST_FILE))
