"""
Central finite-difference check for analytic gradients.
"""

import logging
from typing import Callable, Dict, Mapping

import numpy as np

from .params import value_and_grad, to_tensors
from .tensor import Tensor

logger = logging.getLogger(__name__)

ABS_FLOOR = 1e-5


def numeric_gradient(loss_fn: Callable[[Dict[str, Tensor]], Tensor],
                     params: Mapping[str, np.ndarray],
                     h: float = 1e-5) -> Dict[str, np.ndarray]:
    """Central differences ``(L(p+h) - L(p-h)) / 2h`` for every coordinate."""
    work = {name: np.array(value, dtype=np.float64) for name, value in params.items()}
    grads = {}
    for name, value in work.items():
        grad = np.zeros_like(value)
        flat = value.reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + h
            plus = loss_fn(to_tensors(work, requires_grad=False)).item()
            flat[i] = saved - h
            minus = loss_fn(to_tensors(work, requires_grad=False)).item()
            flat[i] = saved
            grad.reshape(-1)[i] = (plus - minus) / (2.0 * h)
        grads[name] = grad
    return grads


def max_relative_error(loss_fn: Callable[[Dict[str, Tensor]], Tensor],
                       params: Mapping[str, np.ndarray],
                       h: float = 1e-5) -> float:
    """
    Largest ``|analytic - numeric| / max(|analytic| + |numeric|, floor)``.

    The absolute floor keeps coordinates whose true gradient is zero from
    dominating the ratio with round-off noise.
    """
    _, analytic = value_and_grad(loss_fn, params)
    numeric = numeric_gradient(loss_fn, params, h)
    worst = 0.0
    for name in params:
        a, n = analytic[name], numeric[name]
        denom = np.maximum(np.abs(a) + np.abs(n), ABS_FLOOR)
        if a.size:
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    logger.debug(f"Gradient check worst relative error {worst:.3e}")
    return worst
