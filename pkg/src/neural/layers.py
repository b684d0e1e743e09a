"""
Layer constructors and forward helpers over flat parameter trees.

A parameter tree is a flat dict from dotted names (``"actor.l1.W"``) to
float64 arrays. Layers are addressed by prefix, so one tree can hold the
actor, the critic and the encoder heads side by side.
"""

import logging
from typing import Dict, Mapping, Sequence

import numpy as np

from . import ops
from .recurrent import gru_sequence
from .tensor import Tensor

logger = logging.getLogger(__name__)

ParamTree = Dict[str, np.ndarray]
TensorTree = Mapping[str, Tensor]

ACTIVATIONS = {
    'relu': ops.relu,
    'tanh': ops.tanh,
}


def scaled_uniform(rng: np.random.Generator, n_out: int, n_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(n_in)
    return rng.uniform(-bound, bound, size=(n_out, n_in))


def orthogonal(rng: np.random.Generator, n: int, gain: float = 1.0) -> np.ndarray:
    """Random orthogonal square matrix via QR with sign correction."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    return gain * q


def init_dense(rng: np.random.Generator, prefix: str, n_in: int, n_out: int,
               scale: float = 1.0) -> ParamTree:
    """
    Create a dense layer's parameters.

    Args:
        rng: Generator
        prefix: Name prefix, e.g. ``"actor.l1"``
        n_in: Input width
        n_out: Output width
        scale: Multiplier applied to the uniform weights

    Returns:
        Tree with ``{prefix}.W`` (out, in) and ``{prefix}.b`` (out,)
    """
    return {
        f"{prefix}.W": scale * scaled_uniform(rng, n_out, n_in),
        f"{prefix}.b": np.zeros(n_out),
    }


def init_mlp(rng: np.random.Generator, prefix: str, sizes: Sequence[int],
             final_scale: float = 1.0) -> ParamTree:
    """Stack of dense layers named ``{prefix}.l1``, ``{prefix}.l2``, ..."""
    params: ParamTree = {}
    n_layers = len(sizes) - 1
    for i in range(n_layers):
        scale = final_scale if i == n_layers - 1 else 1.0
        params.update(init_dense(rng, f"{prefix}.l{i + 1}", sizes[i], sizes[i + 1], scale))
    return params


def init_gru(rng: np.random.Generator, prefix: str, n_in: int, hidden: int) -> ParamTree:
    """GRU parameters: uniform input weights, orthogonal recurrent blocks, zero biases."""
    w_hh = np.concatenate([orthogonal(rng, hidden) for _ in range(3)], axis=0)
    return {
        f"{prefix}.W_ih": scaled_uniform(rng, 3 * hidden, n_in),
        f"{prefix}.W_hh": w_hh,
        f"{prefix}.b_ih": np.zeros(3 * hidden),
        f"{prefix}.b_hh": np.zeros(3 * hidden),
    }


def mlp_depth(params: Mapping[str, object], prefix: str) -> int:
    depth = 0
    while f"{prefix}.l{depth + 1}.W" in params:
        depth += 1
    return depth


def dense_forward(params: TensorTree, prefix: str, x: Tensor) -> Tensor:
    return ops.dense(x, params[f"{prefix}.W"], params[f"{prefix}.b"])


def mlp_forward(params: TensorTree, prefix: str, x: Tensor,
                activation: str = 'tanh', activate_last: bool = False) -> Tensor:
    """
    Apply ``{prefix}.l1 .. lN`` with the activation between layers.

    Args:
        params: Tensor tree
        prefix: Layer name prefix
        x: Input of shape (N, in)
        activation: ``relu`` or ``tanh``
        activate_last: Apply the activation after the final layer too

    Returns:
        Output tensor
    """
    act = ACTIVATIONS[activation]
    depth = mlp_depth(params, prefix)
    for i in range(1, depth + 1):
        x = dense_forward(params, f"{prefix}.l{i}", x)
        if i < depth or activate_last:
            x = act(x)
    return x


def gru_forward(params: TensorTree, prefix: str, inputs: Tensor,
                lengths: np.ndarray) -> Tensor:
    return gru_sequence(inputs, lengths,
                        params[f"{prefix}.W_ih"], params[f"{prefix}.W_hh"],
                        params[f"{prefix}.b_ih"], params[f"{prefix}.b_hh"])


def sub_tree(params: Mapping[str, np.ndarray], prefix: str) -> ParamTree:
    """Entries under ``prefix.`` with the prefix stripped."""
    cut = len(prefix) + 1
    return {name[cut:]: value for name, value in params.items() if name.startswith(prefix + '.')}
