"""
Archive snapshots on disk.

Layout under ``<root>/archives/<tag>/``::

    archive.json            manifest with the elite index
    elites/<id>.tlpb        parameters (+ .json sidecar)
    sketches/<id>.jsonl     retained evaluation episodes
    sketches/base.jsonl     base-elite sketch used for the reference descriptor
    stale-v<t>.json         manifest frozen before maintenance at version t
    stale-v<t>/             payload of that stale snapshot
"""

import logging
import os
from typing import Dict, Optional

import numpy as np

from .container import ArchiveConfig, UnstructuredArchive
from .elite import Elite
from ..gridworld import load_episodes, save_episodes
from ..neural import load_params, save_params
from ..utils.errors import ArtifactError
from ..utils.storage import read_json, write_json

logger = logging.getLogger(__name__)

MANIFEST = 'archive.json'
BASE_SKETCH = 'base'


def archive_dir(root: str, tag: str) -> str:
    return os.path.join(root, 'archives', tag)


def _write_payload(archive: UnstructuredArchive, payload_dir: str) -> None:
    for elite in archive.elites:
        save_params(os.path.join(payload_dir, 'elites', elite.elite_id), elite.params)
        if elite.sketch is not None:
            save_episodes(os.path.join(payload_dir, 'sketches', f"{elite.elite_id}.jsonl"), elite.sketch)
    if archive.base_sketch is not None:
        save_episodes(os.path.join(payload_dir, 'sketches', f"{BASE_SKETCH}.jsonl"), archive.base_sketch)


def archive_manifest(archive: UnstructuredArchive) -> Dict:
    return {
        'base_tag': archive.base_tag,
        'd_min': archive.d_min,
        'target': archive.config.target_size,
        'capacity': archive.config.capacity,
        'embedding_version': archive.version,
        'z_ref': archive.z_ref.tolist() if archive.z_ref is not None else None,
        'base_elite_id': archive.base_elite_id,
        'counter': archive.counter,
        'config': archive.config.to_dict(),
        'summary': archive.summary(),
        'stats': dict(archive.stats),
        'elites': [e.to_record() for e in archive.elites],
    }


def save_archive(root: str, archive: UnstructuredArchive) -> str:
    """
    Write the current snapshot of ``archive``.

    Returns:
        Manifest path
    """
    directory = archive_dir(root, archive.base_tag)
    _write_payload(archive, directory)
    path = write_json(os.path.join(directory, MANIFEST), archive_manifest(archive))
    logger.info(f"[{archive.base_tag}] Saved archive snapshot with {len(archive)} elites")
    return path


def save_stale_snapshot(root: str, archive: UnstructuredArchive) -> str:
    """Freeze the archive as ``stale-v<version>`` before it is re-embedded."""
    directory = archive_dir(root, archive.base_tag)
    label = f"stale-v{archive.version}"
    _write_payload(archive, os.path.join(directory, label))
    return write_json(os.path.join(directory, f"{label}.json"), archive_manifest(archive))


def load_archive(directory: str, manifest_name: str = MANIFEST,
                 payload_dir: Optional[str] = None) -> UnstructuredArchive:
    """
    Rebuild an archive from a snapshot directory.

    Elites whose sketch file is missing come back with ``sketch=None``.

    Raises:
        ArtifactError: If the manifest or a parameter blob is missing
    """
    manifest = read_json(os.path.join(directory, manifest_name))
    payload_dir = payload_dir or directory
    config = ArchiveConfig.from_dict(manifest.get('config', {}))
    archive = UnstructuredArchive(manifest['base_tag'], config, manifest['embedding_version'])
    archive.d_min = float(manifest['d_min'])
    archive.counter = int(manifest.get('counter', 0))
    archive.base_elite_id = manifest.get('base_elite_id')
    if manifest.get('z_ref') is not None:
        archive.z_ref = np.asarray(manifest['z_ref'], dtype=np.float64)
    archive.stats.update(manifest.get('stats', {}))

    def sketch_of(name: str):
        path = os.path.join(payload_dir, 'sketches', f"{name}.jsonl")
        return load_episodes(path, archive.base_tag) if os.path.exists(path) else None

    for record in manifest['elites']:
        blob = os.path.join(payload_dir, 'elites', record['id'])
        try:
            params = load_params(blob)
        except ArtifactError:
            logger.error(f"[{archive.base_tag}] Missing parameters for elite {record['id']}")
            raise
        archive.elites.append(Elite.from_record(record, params, sketch_of(record['id'])))
    archive.base_sketch = sketch_of(BASE_SKETCH)
    return archive
