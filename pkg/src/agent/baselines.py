"""
Single-model continual-learning transforms: the L2 pull toward the initial
parameters and the shrink-and-perturb boundary reset.
"""

import logging
from typing import Mapping

import numpy as np

from ..neural import Tensor, ops
from ..neural.params import ParamTree, check_same_structure, tree_sq_distance
from ..utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_L2INIT_LAMBDA = 0.1
DEFAULT_SHRINK_ALPHA = 0.9
DEFAULT_PERTURB_SCALE = 1e-3


def l2init_penalty(params: Mapping[str, np.ndarray], init: Mapping[str, np.ndarray],
                   lam: float = DEFAULT_L2INIT_LAMBDA) -> float:
    """
    ``lam * ||params - init||^2`` as a number.

    Raises:
        ShapeError: If the trees differ in structure
    """
    return float(lam) * tree_sq_distance(params, init)


def l2init_term(tensors: Mapping[str, Tensor], init: Mapping[str, np.ndarray], lam: float) -> Tensor:
    """Differentiable version of ``l2init_penalty`` over a tensor tree."""
    check_same_structure({n: t.value for n, t in tensors.items() if n in init}, init)
    total = None
    for name in sorted(init):
        term = ops.sum(ops.square(tensors[name] - init[name]))
        total = term if total is None else total + term
    return ops.mul(total, float(lam))


def shrink_and_perturb(params: Mapping[str, np.ndarray], alpha: float = DEFAULT_SHRINK_ALPHA,
                       noise_scale: float = DEFAULT_PERTURB_SCALE,
                       rng: np.random.Generator = None) -> ParamTree:
    """
    ``alpha * params + noise_scale * eps`` with standard-normal ``eps``.

    Args:
        params: Parameter tree (left untouched)
        alpha: Shrink factor in [0, 1]
        noise_scale: Perturbation standard deviation
        rng: Generator; required when ``noise_scale`` is positive

    Returns:
        New parameter tree
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"Shrink factor must lie in [0, 1], got {alpha}")
    if noise_scale < 0:
        raise ConfigurationError(f"Noise scale must be non-negative, got {noise_scale}")
    out: ParamTree = {}
    for name in sorted(params):
        value = alpha * np.asarray(params[name], dtype=np.float64)
        if noise_scale > 0:
            value = value + noise_scale * rng.standard_normal(np.shape(params[name]))
        out[name] = value
    return out
