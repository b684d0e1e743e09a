"""
Novelty and cross-archive geometry diagnostics over archive descriptors.
"""

import logging
from typing import Any, Dict, List, NamedTuple, Sequence

import numpy as np

from ..archive import UnstructuredArchive
from ..utils.errors import InsufficientDataError, StaleDescriptorError

logger = logging.getLogger(__name__)

EPS = 1e-8


class Geometry(NamedTuple):
    tags: List[str]
    centroids: np.ndarray
    radii: np.ndarray
    separation: np.ndarray
    distance: np.ndarray

    def nearest(self) -> List[Dict[str, Any]]:
        """Nearest other archive by centroid distance for each archive."""
        rows = []
        for k, tag in enumerate(self.tags):
            others = [l for l in range(len(self.tags)) if l != k]
            if not others:
                rows.append({'tag': tag, 'nearest': None, 'distance': None})
                continue
            l = min(others, key=lambda j: (self.distance[k, j], self.tags[j]))
            rows.append({'tag': tag, 'nearest': self.tags[l], 'distance': float(self.distance[k, l])})
        return rows


def novelty_norm(descriptors: np.ndarray) -> np.ndarray:
    """
    Nearest-neighbor distance of every descriptor divided by the median one.

    Raises:
        InsufficientDataError: With fewer than 2 descriptors
    """
    z = np.asarray(descriptors, dtype=np.float64)
    if len(z) < 2:
        raise InsufficientDataError("Novelty needs at least two elites")
    d = np.linalg.norm(z[:, None, :] - z[None, :, :], axis=2)
    np.fill_diagonal(d, np.inf)
    nu = d.min(axis=1)
    return nu / (np.median(nu) + EPS)


def geometry(archives: Sequence[UnstructuredArchive]) -> Geometry:
    """
    Centroids, RMS radii, the separation matrix S and centroid distances D.

    ``S_kl = |c_k - c_l| / (sqrt(R_k^2 + R_l^2) + 1e-8)``. Archives with zero
    radius make S very large; they are reported with a warning.

    Raises:
        InsufficientDataError: If an archive is empty
        StaleDescriptorError: If the archives carry different versions
    """
    if not archives:
        raise InsufficientDataError("Geometry needs at least one archive")
    version = archives[0].version
    centroids, radii = [], []
    for archive in archives:
        if archive.version != version:
            raise StaleDescriptorError(version, archive.version)
        if not len(archive):
            raise InsufficientDataError(f"Archive {archive.base_tag} is empty")
        z = archive.descriptors()
        c = z.mean(axis=0)
        centroids.append(c)
        radii.append(float(np.sqrt(np.mean(np.sum((z - c) ** 2, axis=1)))))
    c = np.stack(centroids)
    r = np.array(radii)
    distance = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=2)
    separation = distance / (np.sqrt(r[:, None] ** 2 + r[None, :] ** 2) + EPS)
    np.fill_diagonal(separation, 0.0)
    degenerate = [a.base_tag for a, radius in zip(archives, r) if radius == 0]
    if degenerate:
        logger.warning(f"Zero-radius archives inflate separation: {', '.join(degenerate)}")
    return Geometry([a.base_tag for a in archives], c, r, separation, distance)


def qd_bins(fitness: Sequence[float], novelty: Sequence[float], bins: int = 10) -> List[Dict[str, Any]]:
    """2-D histogram counts of (fitness, normalized novelty) for density plots."""
    counts, f_edges, n_edges = np.histogram2d(np.asarray(fitness), np.asarray(novelty), bins=bins)
    rows = []
    for i in range(bins):
        for j in range(bins):
            if counts[i, j]:
                rows.append({
                    'fitness_lo': float(f_edges[i]), 'fitness_hi': float(f_edges[i + 1]),
                    'novelty_lo': float(n_edges[j]), 'novelty_hi': float(n_edges[j + 1]),
                    'count': int(counts[i, j]),
                })
    return rows
