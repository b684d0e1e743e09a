"""
Robust per-dimension normalization of policy descriptors.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Sequence, Tuple

import numpy as np

from .encoder import LATENT_DIM, T_MAX, encode_episodes, latent_dim_of
from ..gridworld import EpisodeSet
from ..utils.errors import InsufficientDataError, ShapeError

logger = logging.getLogger(__name__)

SIGMA_MIN = 1e-3
IQR_TO_SIGMA = 1.349
NORMALIZE_EPS = 1e-8


@dataclass
class Normalizer:
    """
    Attributes:
        mu: Per-dimension median of the fit descriptors
        sigma: Per-dimension IQR/1.349, floored at 1e-3
        version: Incremented on every refit
        fit_size: Number of descriptors the fit used
    """

    mu: np.ndarray
    sigma: np.ndarray
    version: int = 0
    fit_size: int = 0

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        if self.mu.shape != self.sigma.shape:
            raise ShapeError(f"Normalizer center {self.mu.shape} and scale {self.sigma.shape} differ")

    @classmethod
    def identity(cls, dim: int = LATENT_DIM, version: int = 0) -> 'Normalizer':
        return cls(np.zeros(dim), np.ones(dim), version, 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mu': self.mu.tolist(),
            'sigma': self.sigma.tolist(),
            'version': int(self.version),
            'fit_size': int(self.fit_size),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'Normalizer':
        return cls(np.asarray(data['mu']), np.asarray(data['sigma']),
                   int(data.get('version', 0)), int(data.get('fit_size', 0)))


def robust_fit(descriptors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Median and floored IQR/1.349 per column, quartiles by linear interpolation.

    Args:
        descriptors: Array (N, d), N >= 2

    Returns:
        (mu, sigma)
    """
    z = np.asarray(descriptors, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] < 2:
        raise InsufficientDataError(f"Robust fit needs at least 2 descriptors, got shape {z.shape}")
    q25, mu, q75 = np.percentile(z, [25, 50, 75], axis=0)
    sigma = np.maximum((q75 - q25) / IQR_TO_SIGMA, SIGMA_MIN)
    return mu, sigma


def normalize(z: np.ndarray, normalizer: Normalizer) -> np.ndarray:
    """``(z - mu) / (sigma + 1e-8)``; works on a vector or a stack of rows."""
    return (np.asarray(z, dtype=np.float64) - normalizer.mu) / (normalizer.sigma + NORMALIZE_EPS)


def mean_descriptors(encoder: Mapping[str, np.ndarray], bank: Sequence[EpisodeSet],
                     t_max: int = T_MAX) -> np.ndarray:
    """
    Raw ``z_mean`` of every set; rows of unusable sets are NaN.
    """
    sizes = [len(s) if s is not None else 0 for s in bank]
    episodes = [e for s in bank if s is not None for e in s]
    rows = np.full((len(bank), latent_dim_of(encoder)), np.nan)
    if not episodes:
        return rows
    z = encode_episodes(encoder, episodes, t_max)
    start = 0
    for i, size in enumerate(sizes):
        if size:
            rows[i] = z[start:start + size].mean(axis=0)
        start += size
    return rows


def fit_normalizer(encoder: Mapping[str, np.ndarray], bank: Sequence[EpisodeSet],
                   previous_version: int = 0, t_max: int = T_MAX) -> Normalizer:
    """
    Fit a normalizer on the mean descriptors of ``bank``.

    Sets that are empty or encode to non-finite values are discarded.

    Args:
        encoder: Encoder parameters
        bank: Episode sets to fit on
        previous_version: Version of the normalizer being replaced
        t_max: Truncation length

    Returns:
        Normalizer with version ``previous_version + 1``

    Raises:
        InsufficientDataError: If fewer than 2 sets survive the discard rule
    """
    rows = mean_descriptors(encoder, bank, t_max)
    valid = rows[np.all(np.isfinite(rows), axis=1)]
    dropped = len(rows) - len(valid)
    if dropped:
        logger.warning(f"Discarded {dropped} malformed descriptors before normalizer fit")
    if len(valid) < 2:
        raise InsufficientDataError(f"Normalizer fit needs 2 valid descriptors, got {len(valid)}")
    mu, sigma = robust_fit(valid)
    logger.info(f"Fitted normalizer v{previous_version + 1} on {len(valid)} descriptors")
    return Normalizer(mu, sigma, previous_version + 1, len(valid))
