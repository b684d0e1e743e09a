"""
JSON and JSON-lines persistence for run artifacts.

Writers produce canonical output (sorted keys, fixed separators) so that two
runs with the same configuration and seed write byte-identical files.
"""

import hashlib
import json
import logging
import os
from typing import Any, Dict, Iterable, Iterator, List, Optional

import numpy as np

from .errors import ArtifactError

logger = logging.getLogger(__name__)


def _to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays into JSON-serializable python values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def canonical_json(obj: Any) -> str:
    """Sorted keys, no whitespace: the form hashed for config identity."""
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), default=_to_builtin)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def write_json(path: str, obj: Any, indent: Optional[int] = 2) -> str:
    """
    Write a JSON document atomically (temp file then rename).

    Args:
        path: Destination path
        obj: JSON-serializable object (numpy values allowed)
        indent: Indentation, None for compact

    Returns:
        The path written
    """
    tmp = f"{path}.tmp"
    try:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        with open(tmp, 'w', encoding='utf-8') as f:
            json.dump(obj, f, indent=indent, sort_keys=True, default=_to_builtin)
            f.write('\n')
        os.replace(tmp, path)
    except (OSError, TypeError) as e:
        raise ArtifactError(f"Failed to write JSON ({e})", path) from e
    return path


def read_json(path: str) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ArtifactError("Missing artifact", path) from e
    except (OSError, ValueError) as e:
        raise ArtifactError(f"Corrupt JSON artifact ({e})", path) from e


def write_jsonl(path: str, records: Iterable[Dict[str, Any]]) -> int:
    """Write records one per line; returns the number written."""
    count = 0
    try:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            for record in records:
                f.write(canonical_json(record))
                f.write('\n')
                count += 1
    except OSError as e:
        raise ArtifactError(f"Failed to write JSON lines ({e})", path) from e
    return count


def iter_jsonl(path: str) -> Iterator[Dict[str, Any]]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for number, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except ValueError as e:
                    raise ArtifactError(f"Bad JSON on line {number} ({e})", path) from e
    except FileNotFoundError as e:
        raise ArtifactError("Missing artifact", path) from e


def read_jsonl(path: str) -> List[Dict[str, Any]]:
    return list(iter_jsonl(path))


class JsonlWriter:
    """
    Append-only JSON-lines sink that flushes after every record.
    """

    def __init__(self, path: str, mode: str = 'w'):
        self.path = path
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        try:
            self._file = open(path, mode, encoding='utf-8')  # pylint: disable=consider-using-with
        except OSError as e:
            raise ArtifactError(f"Cannot open log ({e})", path) from e
        self.count = 0

    def write(self, record: Dict[str, Any]) -> None:
        self._file.write(canonical_json(record))
        self._file.write('\n')
        self._file.flush()
        self.count += 1

    def close(self) -> None:
        if not self._file.closed:
            self._file.flush()
            self._file.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class ArtifactIndex:
    """
    Keeps ``index.json`` in a directory listing the artifacts written there.
    """

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self.index_file = os.path.join(root, 'index.json')
        self.entries: Dict[str, Dict[str, Any]] = self._load_index()

    def _load_index(self) -> Dict[str, Dict[str, Any]]:
        if os.path.exists(self.index_file):
            try:
                return read_json(self.index_file)
            except ArtifactError as e:
                logger.warning(f"Ignoring unreadable artifact index: {e}")
        return {}

    def register(self, relative_path: str, kind: str, **details: Any) -> None:
        """Record an artifact (path relative to the root) and persist the index."""
        self.entries[relative_path] = {'kind': kind, **details}
        write_json(self.index_file, self.entries)

    def path(self, relative_path: str) -> str:
        return os.path.join(self.root, relative_path)

    def find(self, kind: Optional[str] = None) -> List[str]:
        return sorted(p for p, info in self.entries.items() if kind is None or info.get('kind') == kind)
