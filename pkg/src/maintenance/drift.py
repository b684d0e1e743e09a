"""
Drift diagnostics between two embeddings of the same anchor sets.
"""

from typing import Sequence, Tuple

import numpy as np

from ..utils.errors import ShapeError

ZERO_NORM = 1e-12


def drift_metrics(old: Sequence[np.ndarray], new: Sequence[np.ndarray]) -> Tuple[float, float]:
    """
    Mean L2 distance and mean cosine similarity over paired descriptors.

    A zero vector has cosine 1 with another zero vector and 0 with anything
    else.

    Raises:
        ShapeError: If the lists are empty or differ in length or width
    """
    a = np.asarray(old, dtype=np.float64)
    b = np.asarray(new, dtype=np.float64)
    if a.ndim != 2 or a.shape != b.shape or len(a) == 0:
        raise ShapeError(f"Drift needs two equal non-empty descriptor lists, got {a.shape} and {b.shape}")
    l2 = np.linalg.norm(b - a, axis=1)
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    zero_a, zero_b = na < ZERO_NORM, nb < ZERO_NORM
    with np.errstate(invalid='ignore', divide='ignore'):
        cos = np.sum(a * b, axis=1) / (na * nb)
    cos = np.where(zero_a | zero_b, np.where(zero_a & zero_b, 1.0, 0.0), cos)
    return float(l2.mean()), float(cos.mean())
