"""
Adam optimizer with resettable state and global-norm gradient clipping.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Tuple

import numpy as np

from .params import ParamTree, assert_finite, check_same_structure, global_norm, zeros_like_tree
from ..utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_CLIP_NORM = 0.5


@dataclass
class OptimizerState:
    """First/second moment accumulators mirroring a parameter tree."""

    m: ParamTree
    v: ParamTree
    step: int = 0
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    history: dict = field(default_factory=lambda: {'resets': 0})

    def validate(self):
        if self.lr <= 0:
            raise ConfigurationError(f"Learning rate must be positive, got {self.lr}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigurationError("Adam betas must lie in [0, 1)")
        if self.eps <= 0:
            raise ConfigurationError("Adam eps must be positive")


def init_optimizer(params: Mapping[str, np.ndarray], lr: float = 3e-4,
                   beta1: float = 0.9, beta2: float = 0.999,
                   eps: float = 1e-8) -> OptimizerState:
    state = OptimizerState(m=zeros_like_tree(params), v=zeros_like_tree(params),
                           lr=lr, beta1=beta1, beta2=beta2, eps=eps)
    state.validate()
    return state


def reset(state: OptimizerState) -> OptimizerState:
    """Zero both accumulators and the step counter; keep hyperparameters."""
    history = dict(state.history)
    history['resets'] = history.get('resets', 0) + 1
    logger.debug(f"Optimizer reset after {state.step} steps")
    return OptimizerState(m=zeros_like_tree(state.m), v=zeros_like_tree(state.v),
                          step=0, lr=state.lr, beta1=state.beta1, beta2=state.beta2,
                          eps=state.eps, history=history)


def clip_by_global_norm(grads: Mapping[str, np.ndarray],
                        max_norm: float = DEFAULT_CLIP_NORM) -> Tuple[ParamTree, float]:
    """
    Rescale gradients so their joint L2 norm is at most ``max_norm``.

    Returns:
        (clipped gradients, norm before clipping)
    """
    norm = global_norm(grads)
    if norm > max_norm > 0:
        scale = max_norm / (norm + 1e-12)
        return {name: g * scale for name, g in grads.items()}, norm
    return dict(grads), norm


def adam_step(params: Mapping[str, np.ndarray], grads: Mapping[str, np.ndarray],
              state: OptimizerState) -> Tuple[ParamTree, OptimizerState]:
    """
    Apply one bias-corrected Adam update.

    Args:
        params: Current parameters
        grads: Gradients with the same structure
        state: Optimizer state

    Returns:
        (new parameters, new state); inputs are left untouched

    Raises:
        ShapeError: If the trees disagree in structure
        NonFiniteError: If the update produces NaN or Inf
    """
    check_same_structure(params, grads)
    check_same_structure(params, state.m)

    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** step
    correction2 = 1.0 - b2 ** step

    new_params: ParamTree = {}
    new_m: ParamTree = {}
    new_v: ParamTree = {}
    for name, value in params.items():
        g = grads[name]
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_params[name] = value - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        new_m[name] = m
        new_v[name] = v

    assert_finite(new_params, 'parameters after optimizer step')
    new_state = OptimizerState(m=new_m, v=new_v, step=step, lr=state.lr, beta1=b1,
                               beta2=b2, eps=state.eps, history=dict(state.history))
    return new_params, new_state

