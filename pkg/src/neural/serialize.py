"""
Binary parameter blobs.

Layout (all integers little-endian):

    magic    4 bytes  b'TLPB'
    version  uint16
    count    uint32
    entries  count x (name_len uint16, name utf-8, ndim uint8, dims uint64 x ndim)
    payload  float64 values of every entry, row-major, in table order

A JSON sidecar (``<blob>.json``) lists names, shapes and the SHA-256 of the
payload so blobs can be inspected and verified without numpy.
"""

import hashlib
import json
import logging
import os
import struct
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from ..utils.errors import ArtifactError

logger = logging.getLogger(__name__)

MAGIC = b'TLPB'
FORMAT_VERSION = 1
BLOB_SUFFIX = '.tlpb'


def params_to_bytes(params: Mapping[str, np.ndarray]) -> Tuple[bytes, Dict[str, Any]]:
    """
    Encode a parameter tree.

    Returns:
        (blob bytes, sidecar manifest dict)
    """
    names = sorted(params)
    header = [MAGIC, struct.pack('<HI', FORMAT_VERSION, len(names))]
    payload = []
    entries = []
    for name in names:
        array = np.array(params[name], dtype='<f8', order='C', copy=True)
        encoded = name.encode('utf-8')
        header.append(struct.pack('<H', len(encoded)))
        header.append(encoded)
        header.append(struct.pack('<B', array.ndim))
        header.append(struct.pack(f"<{array.ndim}Q", *array.shape))
        payload.append(array.tobytes(order='C'))
        entries.append({'name': name, 'shape': list(array.shape)})
    body = b''.join(payload)
    manifest = {
        'format': 'tlpb',
        'version': FORMAT_VERSION,
        'entries': entries,
        'sha256': hashlib.sha256(body).hexdigest(),
    }
    return b''.join(header) + body, manifest


def params_from_bytes(blob: bytes) -> Dict[str, np.ndarray]:
    """Decode bytes produced by ``params_to_bytes``."""
    if blob[:4] != MAGIC:
        raise ArtifactError("Not a parameter blob (bad magic)")
    try:
        version, count = struct.unpack_from('<HI', blob, 4)
        if version != FORMAT_VERSION:
            raise ArtifactError(f"Unsupported blob version {version}")
        offset = 10
        table = []
        for _ in range(count):
            (name_len,) = struct.unpack_from('<H', blob, offset)
            offset += 2
            name = blob[offset:offset + name_len].decode('utf-8')
            offset += name_len
            (ndim,) = struct.unpack_from('<B', blob, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}Q", blob, offset)
            offset += 8 * ndim
            table.append((name, tuple(int(d) for d in shape)))
        params = {}
        for name, shape in table:
            size = int(np.prod(shape)) if shape else 1
            end = offset + 8 * size
            if end > len(blob):
                raise ArtifactError(f"Blob truncated while reading {name}")
            params[name] = np.frombuffer(blob[offset:end], dtype='<f8').astype(np.float64).reshape(shape)
            offset = end
    except struct.error as e:
        raise ArtifactError(f"Corrupt parameter blob: {e}") from e
    return params


def save_params(path: str, params: Mapping[str, np.ndarray],
                metadata: Optional[Dict[str, Any]] = None) -> str:
    """
    Write ``path`` (blob) and ``path + '.json'`` (sidecar).

    Args:
        path: Blob path; ``.tlpb`` is appended when missing
        params: Parameter tree
        metadata: Extra fields stored in the sidecar

    Returns:
        The blob path actually written
    """
    if not path.endswith(BLOB_SUFFIX):
        path = path + BLOB_SUFFIX
    blob, manifest = params_to_bytes(params)
    if metadata:
        manifest['metadata'] = metadata
    try:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        with open(path, 'wb') as f:
            f.write(blob)
        with open(path + '.json', 'w', encoding='utf-8') as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
    except OSError as e:
        raise ArtifactError(f"Failed to write parameters ({e})", path) from e
    logger.debug(f"Saved {len(manifest['entries'])} parameter arrays to {path}")
    return path


def load_params(path: str, verify: bool = True) -> Dict[str, np.ndarray]:
    """
    Read a blob, checking the payload hash against the sidecar when present.
    """
    if not path.endswith(BLOB_SUFFIX):
        path = path + BLOB_SUFFIX
    try:
        with open(path, 'rb') as f:
            blob = f.read()
    except OSError as e:
        raise ArtifactError(f"Cannot read parameters ({e})", path) from e
    params = params_from_bytes(blob)
    sidecar = path + '.json'
    if verify and os.path.exists(sidecar):
        with open(sidecar, 'r', encoding='utf-8') as f:
            manifest = json.load(f)
        _, actual = params_to_bytes(params)
        if actual['sha256'] != manifest.get('sha256'):
            raise ArtifactError("Parameter blob does not match its sidecar hash", path)
    return params


def load_metadata(path: str) -> Dict[str, Any]:
    if not path.endswith(BLOB_SUFFIX):
        path = path + BLOB_SUFFIX
    try:
        with open(path + '.json', 'r', encoding='utf-8') as f:
            return json.load(f).get('metadata', {})
    except (OSError, ValueError) as e:
        raise ArtifactError(f"Cannot read parameter sidecar ({e})", path) from e
